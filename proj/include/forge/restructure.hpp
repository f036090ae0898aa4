#pragma once

/*!
  \file restructure.hpp
  \brief Equivalence-preserving AIG restructuring passes

  Every pass takes a structurally hashed AIG and returns an equivalent,
  structurally hashed AIG.  Passes pick a local implementation per node
  (kept, resynthesized over a cut, or re-expressed over divisors) and the
  result is rebuilt lazily from the outputs, so logic that is no longer
  referenced disappears.  A pass whose result is worse than its input
  under the pass's own metric (node count, or depth for balancing)
  returns its input unchanged.
*/

#include "aig.hpp"
#include "detail/rng.hpp"
#include "justify.hpp"
#include "truth_table.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace forge
{

namespace detail
{

/// Fanout counts including references from primary outputs.
inline std::vector<uint32_t> reference_counts( AigGraph const& g )
{
  std::vector<uint32_t> refs( g.size(), 0 );
  for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
  {
    ++refs[g.fanin0( i ).index()];
    ++refs[g.fanin1( i ).index()];
  }
  for ( auto po : g.pos() )
    ++refs[po.index()];
  return refs;
}

/* Maximum fanout-free cone of `root` bounded by `leaves`: the nodes that
 * become dangling when `root` is removed.  `refs` is restored on return. */
inline std::vector<uint32_t> mffc_nodes( AigGraph const& g, std::vector<uint32_t>& refs, uint32_t root,
                                         std::vector<uint32_t> const& leaves )
{
  std::vector<uint32_t> cone;
  auto is_leaf = [&]( uint32_t j ) { return std::find( leaves.begin(), leaves.end(), j ) != leaves.end(); };
  auto deref = [&]( auto&& self, uint32_t i ) -> void {
    cone.push_back( i );
    for ( auto f : { g.fanin0( i ), g.fanin1( i ) } )
    {
      auto const j = f.index();
      if ( !g.is_and( j ) || is_leaf( j ) )
        continue;
      if ( --refs[j] == 0 )
        self( self, j );
    }
  };
  deref( deref, root );
  for ( auto i : cone )
    for ( auto f : { g.fanin0( i ), g.fanin1( i ) } )
    {
      auto const j = f.index();
      if ( g.is_and( j ) && !is_leaf( j ) )
        ++refs[j];
    }
  std::sort( cone.begin(), cone.end() );
  return cone;
}

/* Reconvergence-driven cut of at most `limit` leaves: starting from the
 * node's fanins, repeatedly expand the leaf whose expansion adds the
 * fewest new leaves. */
inline std::vector<uint32_t> reconvergent_cut( AigGraph const& g, uint32_t root, uint32_t limit )
{
  std::vector<uint32_t> leaves, visited{ root };
  auto seen = [&]( uint32_t j ) { return std::find( visited.begin(), visited.end(), j ) != visited.end(); };
  for ( auto f : { g.fanin0( root ), g.fanin1( root ) } )
    if ( !seen( f.index() ) )
    {
      visited.push_back( f.index() );
      leaves.push_back( f.index() );
    }
  while ( true )
  {
    int best_cost = 100;
    std::size_t best = leaves.size();
    for ( std::size_t k = 0; k < leaves.size(); ++k )
    {
      auto const j = leaves[k];
      if ( !g.is_and( j ) )
        continue;
      int const cost = ( seen( g.fanin0( j ).index() ) ? 0 : 1 ) + ( seen( g.fanin1( j ).index() ) ? 0 : 1 ) - 1;
      if ( cost < best_cost || ( cost == best_cost && best < leaves.size() && g.level( j ) > g.level( leaves[best] ) ) )
      {
        best_cost = cost;
        best = k;
      }
    }
    if ( best == leaves.size() || leaves.size() + best_cost > limit )
      break;
    auto const j = leaves[best];
    leaves.erase( leaves.begin() + static_cast<std::ptrdiff_t>( best ) );
    for ( auto f : { g.fanin0( j ), g.fanin1( j ) } )
      if ( !seen( f.index() ) )
      {
        visited.push_back( f.index() );
        leaves.push_back( f.index() );
      }
  }
  std::sort( leaves.begin(), leaves.end() );
  return leaves;
}

/// Function of `root` over `leaves` (leaf k is variable k).
inline TruthTable cone_truth_table( AigGraph const& g, uint32_t root, std::vector<uint32_t> const& leaves )
{
  auto const n = static_cast<uint32_t>( leaves.size() );
  std::map<uint32_t, TruthTable> tt;
  for ( uint32_t k = 0; k < n; ++k )
    tt.emplace( leaves[k], TruthTable::nth_var( n, k ) );
  tt.emplace( 0, TruthTable::constant( n, true ) );
  auto eval = [&]( auto&& self, uint32_t i ) -> TruthTable const& {
    if ( auto it = tt.find( i ); it != tt.end() )
      return it->second;
    if ( !g.is_and( i ) )
      throw std::logic_error( "cone escapes its cut" );
    auto const f0 = g.fanin0( i ), f1 = g.fanin1( i );
    auto a = self( self, f0.index() );
    auto b = self( self, f1.index() );
    if ( f0.complemented() )
      a = ~a;
    if ( f1.complemented() )
      b = ~b;
    return tt.emplace( i, a & b ).first->second;
  };
  return eval( eval, root );
}

/// Builds a factored form over mapped leaf edges.
inline AigEdge build_form( AigBuilder& b, FactoredForm const& f, std::vector<AigEdge> const& leaves )
{
  using Kind = FactoredForm::Kind;
  switch ( f.kind )
  {
  case Kind::const0:
    return aig_false;
  case Kind::const1:
    return aig_true;
  case Kind::literal:
    return leaves[f.var] ^ f.negated;
  case Kind::and_:
  case Kind::or_:
  {
    bool const is_or = f.kind == Kind::or_;
    std::vector<AigEdge> kids;
    for ( auto const& c : f.children )
      kids.push_back( build_form( b, c, leaves ) ^ is_or );
    return b.land_balanced( std::move( kids ) ) ^ is_or;
  }
  }
  return aig_false;
}

/* Lazy rebuild from the outputs.  `make(i, get)` returns the new edge of
 * old AND node i, using `get` to obtain the new edge of any old edge it
 * depends on; it is called at most once per node and only for nodes that
 * are reachable through the chosen implementations. */
using EdgeGetter = std::function<AigEdge( AigEdge )>;

inline AigGraph lazy_rebuild( AigGraph const& g,
                              std::function<AigEdge( uint32_t, AigBuilder&, EdgeGetter const& )> const& make )
{
  auto out = clone_interface( g );
  AigBuilder b( out );
  std::vector<std::optional<AigEdge>> map( g.size() );
  for ( uint32_t i = 0; i <= g.num_pis(); ++i )
    map[i] = AigEdge( i, false );
  EdgeGetter get = [&]( AigEdge e ) -> AigEdge {
    auto& slot = map[e.index()];
    if ( !slot )
      slot = make( e.index(), b, get );
    return *slot ^ e.complemented();
  };
  for ( uint32_t k = 0; k < g.num_pos(); ++k )
    out.create_po( get( g.po( k ) ), g.po_name( k ) );
  return remove_dangling( out );
}

inline AigEdge structural( AigGraph const& g, uint32_t i, AigBuilder& b, EdgeGetter const& get )
{
  return b.land( get( g.fanin0( i ) ), get( g.fanin1( i ) ) );
}

/// Keeps `candidate` only when it has no more AND nodes than `original`.
inline AigGraph accept_if_not_larger( AigGraph const& original, AigGraph candidate )
{
  if ( candidate.num_ands() > original.num_ands() )
    return original;
  return candidate;
}

} // namespace detail

/* --------------------------------------------------------------------
 * Balancing
 * ------------------------------------------------------------------ */

/// Rebuilds AND trees (and, through complemented edges, OR trees) as depth-minimal trees.
inline AigGraph balance( AigGraph const& g )
{
  auto const refs = detail::reference_counts( g );
  auto collect = [&]( auto&& self, AigEdge e, bool top, std::vector<AigEdge>& leaves ) -> void {
    auto const j = e.index();
    if ( !top && ( e.complemented() || !g.is_and( j ) || refs[j] > 1 ) )
    {
      leaves.push_back( e );
      return;
    }
    self( self, g.fanin0( j ), false, leaves );
    self( self, g.fanin1( j ), false, leaves );
  };
  auto candidate = detail::lazy_rebuild( g, [&]( uint32_t i, AigBuilder& b, detail::EdgeGetter const& get ) {
    std::vector<AigEdge> leaves;
    collect( collect, AigEdge( i, false ), true, leaves );
    std::vector<AigEdge> mapped;
    for ( auto e : leaves )
      mapped.push_back( get( e ) );
    std::sort( mapped.begin(), mapped.end() );
    mapped.erase( std::unique( mapped.begin(), mapped.end() ), mapped.end() );
    for ( std::size_t k = 0; k + 1 < mapped.size(); ++k )
      if ( mapped[k] == !mapped[k + 1] )
        return aig_false;
    return b.land_balanced( std::move( mapped ) );
  } );
  if ( candidate.depth() > g.depth() )
    return g;
  return candidate;
}

/* --------------------------------------------------------------------
 * Rewriting
 * ------------------------------------------------------------------ */

struct RewriteParams
{
  uint32_t cut_size = 4;
  uint32_t max_cuts = 8;
  /// Accept replacements that neither add nor remove nodes (perturbs structure).
  bool zero_gain = true;
  /// Non-zero seeds break ties between equal-gain cuts randomly.
  uint64_t seed = 0;
};

/// Replaces small cuts by resynthesized subgraphs whenever the local gain is non-negative.
inline AigGraph rewrite( AigGraph const& g, RewriteParams const& p = {} )
{
  auto refs = detail::reference_counts( g );
  auto const cuts = enumerate_cuts( g, p.cut_size, p.max_cuts );
  Rng rng( p.seed );

  struct Choice
  {
    std::vector<uint32_t> leaves;
    Synthesis syn;
  };
  std::vector<std::optional<Choice>> choice( g.size() );
  std::unordered_map<uint64_t, Synthesis> cache[7];

  for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
  {
    if ( refs[i] == 0 )
      continue;
    int best_gain = -1;
    std::size_t ties = 0;
    for ( std::size_t c = 1; c < cuts[i].size(); ++c )
    {
      auto const& cut = cuts[i][c];
      auto const nv = cut.leaves.size();
      auto it = cache[nv].find( cut.truth );
      if ( it == cache[nv].end() )
      {
        TruthTable t( static_cast<uint32_t>( nv ) );
        t.words()[0] = cut.truth;
        it = cache[nv].emplace( cut.truth, synthesize( t ) ).first;
      }
      auto const mffc = detail::mffc_nodes( g, refs, i, cut.leaves ).size();
      int const gain = static_cast<int>( mffc ) - static_cast<int>( it->second.form.cost() );
      bool take = false;
      if ( gain > best_gain )
      {
        ties = 1;
        take = true;
      }
      else if ( gain == best_gain && p.seed != 0 )
        take = rng.below( ++ties ) == 0;
      if ( take )
      {
        best_gain = gain;
        choice[i] = Choice{ cut.leaves, it->second };
      }
    }
    if ( best_gain < 0 || ( best_gain == 0 && !p.zero_gain ) )
      choice[i].reset();
  }

  auto candidate = detail::lazy_rebuild( g, [&]( uint32_t i, AigBuilder& b, detail::EdgeGetter const& get ) {
    if ( !choice[i] )
      return detail::structural( g, i, b, get );
    std::vector<AigEdge> leaves;
    for ( auto l : choice[i]->leaves )
      leaves.push_back( get( AigEdge( l, false ) ) );
    return detail::build_form( b, choice[i]->syn.form, leaves ) ^ choice[i]->syn.complemented;
  } );
  return detail::accept_if_not_larger( g, std::move( candidate ) );
}

/* --------------------------------------------------------------------
 * Refactoring
 * ------------------------------------------------------------------ */

struct RefactorParams
{
  uint32_t max_cone_inputs = 10;
  bool zero_gain = false;
};

/// Collapses each node's reconvergent cone to a truth table and refactors its ISOP.
inline AigGraph refactor( AigGraph const& g, RefactorParams const& p = {} )
{
  if ( p.max_cone_inputs > max_truth_table_vars )
    throw std::invalid_argument( "max cone inputs must not exceed 16" );
  if ( p.max_cone_inputs < 2 )
    throw std::invalid_argument( "max cone inputs must be at least 2" );
  auto refs = detail::reference_counts( g );

  struct Choice
  {
    std::vector<uint32_t> leaves;
    Synthesis syn;
  };
  std::vector<std::optional<Choice>> choice( g.size() );
  for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
  {
    if ( refs[i] == 0 )
      continue;
    auto leaves = detail::reconvergent_cut( g, i, p.max_cone_inputs );
    auto const mffc = detail::mffc_nodes( g, refs, i, leaves ).size();
    if ( mffc < 2 && !p.zero_gain )
      continue;
    auto syn = synthesize( detail::cone_truth_table( g, i, leaves ) );
    int const gain = static_cast<int>( mffc ) - static_cast<int>( syn.form.cost() );
    if ( gain > 0 || ( gain == 0 && p.zero_gain ) )
      choice[i] = Choice{ std::move( leaves ), std::move( syn ) };
  }

  auto candidate = detail::lazy_rebuild( g, [&]( uint32_t i, AigBuilder& b, detail::EdgeGetter const& get ) {
    if ( !choice[i] )
      return detail::structural( g, i, b, get );
    std::vector<AigEdge> leaves;
    for ( auto l : choice[i]->leaves )
      leaves.push_back( get( AigEdge( l, false ) ) );
    return detail::build_form( b, choice[i]->syn.form, leaves ) ^ choice[i]->syn.complemented;
  } );
  return detail::accept_if_not_larger( g, std::move( candidate ) );
}

inline AigGraph refactor( AigGraph const& g, uint32_t max_cone_inputs )
{
  return refactor( g, RefactorParams{ max_cone_inputs, false } );
}

/* --------------------------------------------------------------------
 * Resubstitution
 * ------------------------------------------------------------------ */

struct ResubParams
{
  uint32_t max_divisors = 50;
  uint32_t cut_size = 8;
  uint32_t sim_words = 4;
  uint64_t seed = 1;
};

/* Re-expresses nodes over existing divisors (0-resub: a divisor equal to
 * the node up to complement; 1-resub: a two-input AND/OR of divisors)
 * when that strictly shrinks the node's fanout-free cone.  Candidates are
 * filtered by random-simulation signatures and accepted only after an
 * exact check on truth tables over the node's cut. */
inline AigGraph resubstitute( AigGraph const& g, ResubParams const& p = {} )
{
  auto refs = detail::reference_counts( g );
  auto const words = std::max<uint32_t>( 1, p.sim_words );
  Rng rng( p.seed );
  std::vector<uint64_t> pi( std::size_t{ g.num_pis() } * words );
  detail::random_patterns( rng, g.num_pis(), words, pi );
  auto const sig = aig_simulate( g, pi, words );
  auto sig_of = [&]( uint32_t i ) { return std::span<uint64_t const>( &sig[std::size_t{ i } * words], words ); };
  /* does the signature of f (complemented by cf) imply that of d (complemented by cd)? */
  auto sig_implies = [&]( uint32_t f, bool cf, uint32_t d, bool cd ) {
    auto const a = sig_of( f ), b = sig_of( d );
    for ( uint32_t w = 0; w < words; ++w )
      if ( ( a[w] ^ ( cf ? ~uint64_t{ 0 } : 0 ) ) & ~( b[w] ^ ( cd ? ~uint64_t{ 0 } : 0 ) ) )
        return false;
    return true;
  };

  struct Choice
  {
    AigEdge first;
    std::optional<AigEdge> second; ///< empty for an alias
    bool out_complemented = false;
  };
  std::vector<std::optional<Choice>> choice( g.size() );

  for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
  {
    if ( refs[i] == 0 )
      continue;
    auto const leaves = detail::reconvergent_cut( g, i, std::min<uint32_t>( p.cut_size, max_truth_table_vars ) );
    auto const mffc = detail::mffc_nodes( g, refs, i, leaves );
    auto const nv = static_cast<uint32_t>( leaves.size() );

    /* truth tables over the cut for every node inside the window */
    std::map<uint32_t, TruthTable> tt;
    for ( uint32_t k = 0; k < nv; ++k )
      tt.emplace( leaves[k], TruthTable::nth_var( nv, k ) );
    std::vector<uint32_t> divisors( leaves.begin(), leaves.end() );
    auto const lo = leaves.empty() ? i : leaves.front();
    for ( uint32_t j = lo; j < i; ++j )
    {
      if ( !g.is_and( j ) || tt.count( j ) )
        continue;
      auto const a = tt.find( g.fanin0( j ).index() ), b = tt.find( g.fanin1( j ).index() );
      if ( a == tt.end() || b == tt.end() )
        continue;
      auto ta = g.fanin0( j ).complemented() ? ~a->second : a->second;
      auto tb = g.fanin1( j ).complemented() ? ~b->second : b->second;
      tt.emplace( j, ta & tb );
      if ( refs[j] > 0 && !std::binary_search( mffc.begin(), mffc.end(), j ) )
        divisors.push_back( j );
    }
    if ( divisors.size() > p.max_divisors )
      divisors.erase( divisors.begin(), divisors.end() - p.max_divisors );
    auto const f = detail::cone_truth_table( g, i, leaves );

    /* 0-resub */
    for ( auto d : divisors )
    {
      for ( bool c : { false, true } )
        if ( sig_implies( i, false, d, c ) && sig_implies( d, c, i, false ) && tt.at( d ) == ( c ? ~f : f ) )
        {
          choice[i] = Choice{ AigEdge( d, c ), std::nullopt, false };
          break;
        }
      if ( choice[i] )
        break;
    }
    if ( choice[i] || mffc.size() < 2 )
      continue;

    /* 1-resub: f = a & b, or !f = a & b (an OR of the complements) */
    for ( bool out_c : { false, true } )
    {
      auto const target = out_c ? ~f : f;
      std::vector<AigEdge> implied;
      for ( auto d : divisors )
        for ( bool c : { false, true } )
          if ( sig_implies( i, out_c, d, c ) && ( target & ~( c ? ~tt.at( d ) : tt.at( d ) ) ).is_const0() )
            implied.emplace_back( d, c );
      for ( std::size_t x = 0; x < implied.size() && !choice[i]; ++x )
        for ( std::size_t y = x + 1; y < implied.size(); ++y )
        {
          auto const& ta = tt.at( implied[x].index() );
          auto const& tb = tt.at( implied[y].index() );
          if ( ( ( implied[x].complemented() ? ~ta : ta ) & ( implied[y].complemented() ? ~tb : tb ) ) == target )
          {
            choice[i] = Choice{ implied[x], implied[y], out_c };
            break;
          }
        }
      if ( choice[i] )
        break;
    }
  }

  auto candidate = detail::lazy_rebuild( g, [&]( uint32_t i, AigBuilder& b, detail::EdgeGetter const& get ) {
    if ( !choice[i] )
      return detail::structural( g, i, b, get );
    auto const& c = *choice[i];
    if ( !c.second )
      return get( c.first );
    return b.land( get( c.first ), get( *c.second ) ) ^ c.out_complemented;
  } );
  return detail::accept_if_not_larger( g, std::move( candidate ) );
}

inline AigGraph resubstitute( AigGraph const& g, uint32_t max_divisors )
{
  ResubParams p;
  p.max_divisors = max_divisors;
  return resubstitute( g, p );
}

/* --------------------------------------------------------------------
 * Functional reduction
 * ------------------------------------------------------------------ */

enum class PairVerdict
{
  equivalent,
  different,
  unresolved
};

/* Decides whether node a equals node b (complemented by `c`).  Exhaustive
 * over the joint support when it has at most `exhaustive_support` inputs,
 * otherwise a bounded justification search on both mismatch polarities. */
inline PairVerdict prove_pair( AigGraph const& g, uint32_t a, uint32_t b, bool c, uint64_t budget,
                               uint32_t exhaustive_support = 20 )
{
  std::vector<uint8_t> in_cone( g.size(), 0 );
  in_cone[a] = in_cone[b] = 1;
  for ( uint32_t i = std::max( a, b ); i > g.num_pis(); --i )
    if ( in_cone[i] )
    {
      in_cone[g.fanin0( i ).index()] = 1;
      in_cone[g.fanin1( i ).index()] = 1;
    }
  std::vector<uint32_t> support, cone;
  for ( uint32_t i = 1; i < g.size(); ++i )
    if ( in_cone[i] )
      ( g.is_pi( i ) ? support : cone ).push_back( i );

  if ( support.size() <= exhaustive_support )
  {
    auto const total_words = std::max<uint64_t>( 1, ( uint64_t{ 1 } << support.size() ) / 64 );
    auto const chunk = std::min<uint64_t>( total_words, 64 );
    auto const bits = uint64_t{ 1 } << support.size();
    std::vector<uint64_t> pat( support.size() * chunk );
    std::vector<uint64_t> val( std::size_t{ g.size() } * chunk, 0 );
    for ( uint64_t first = 0; first < total_words; first += chunk )
    {
      detail::exhaustive_patterns( support.size(), first, chunk, pat );
      std::fill_n( val.begin(), chunk, ~uint64_t{ 0 } );
      for ( std::size_t k = 0; k < support.size(); ++k )
        std::copy_n( pat.begin() + k * chunk, chunk, val.begin() + support[k] * chunk );
      for ( auto i : cone )
      {
        auto const f0 = g.fanin0( i ), f1 = g.fanin1( i );
        for ( uint64_t w = 0; w < chunk; ++w )
          val[i * chunk + w] = ( val[f0.index() * chunk + w] ^ ( f0.complemented() ? ~uint64_t{ 0 } : 0 ) ) &
                               ( val[f1.index() * chunk + w] ^ ( f1.complemented() ? ~uint64_t{ 0 } : 0 ) );
      }
      for ( uint64_t w = 0; w < chunk; ++w )
      {
        auto diff = val[std::size_t{ a } * chunk + w] ^ val[std::size_t{ b } * chunk + w] ^ ( c ? ~uint64_t{ 0 } : 0 );
        if ( bits < 64 )
          diff &= ( uint64_t{ 1 } << bits ) - 1;
        if ( diff )
          return PairVerdict::different;
      }
    }
    return PairVerdict::equivalent;
  }

  SearchOptions opt;
  opt.budget = budget;
  bool unresolved = false;
  for ( bool av : { false, true } )
  {
    /* a = av and b^c = !av */
    std::vector<AigEdge> targets{ AigEdge( a, !av ), AigEdge( b, av ^ c ) };
    auto const r = justify( g, targets, opt );
    if ( r.status == SearchStatus::satisfiable )
      return PairVerdict::different;
    if ( r.status == SearchStatus::unknown )
      unresolved = true;
  }
  return unresolved ? PairVerdict::unresolved : PairVerdict::equivalent;
}

struct FraigParams
{
  uint32_t sim_words = 4;
  uint64_t seed = 1;
  uint64_t exact_budget = 1000;
  /// Candidates tried per node before giving up on merging it.
  uint32_t max_candidates = 4;
};

/// Merges functionally equivalent nodes (up to complement), proven pairwise.
inline AigGraph fraig( AigGraph const& g, FraigParams const& p = {} )
{
  auto const words = std::max<uint32_t>( 1, p.sim_words );
  Rng rng( p.seed );
  std::vector<uint64_t> pi( std::size_t{ g.num_pis() } * words );
  detail::random_patterns( rng, g.num_pis(), words, pi );
  auto const sig = aig_simulate( g, pi, words );

  /* signatures normalized so that the first pattern evaluates to 0 */
  auto normalized = [&]( uint32_t i ) {
    std::vector<uint64_t> s( sig.begin() + std::size_t{ i } * words, sig.begin() + std::size_t{ i + 1 } * words );
    bool const flip = s[0] & 1u;
    if ( flip )
      for ( auto& w : s )
        w = ~w;
    return std::make_pair( s, flip );
  };

  std::map<std::vector<uint64_t>, std::vector<uint32_t>> classes;
  std::vector<std::optional<AigEdge>> merged( g.size() );
  auto const refs = detail::reference_counts( g );
  for ( uint32_t i = 0; i < g.size(); ++i )
  {
    auto [key, flip] = normalized( i );
    auto& members = classes[key];
    if ( g.is_and( i ) && refs[i] > 0 )
    {
      uint32_t tried = 0;
      for ( auto r : members )
      {
        if ( tried++ >= p.max_candidates )
          break;
        bool const c = flip != normalized( r ).second;
        if ( prove_pair( g, i, r, c, p.exact_budget ) == PairVerdict::equivalent )
        {
          merged[i] = AigEdge( r, c );
          break;
        }
      }
    }
    if ( !merged[i] )
      members.push_back( i );
  }

  auto candidate = detail::lazy_rebuild( g, [&]( uint32_t i, AigBuilder& b, detail::EdgeGetter const& get ) {
    if ( merged[i] )
      return get( *merged[i] );
    return detail::structural( g, i, b, get );
  } );
  return detail::accept_if_not_larger( g, std::move( candidate ) );
}

inline AigGraph fraig( AigGraph const& g, uint32_t sim_words, uint64_t seed, uint64_t exact_budget )
{
  FraigParams p;
  p.sim_words = sim_words;
  p.seed = seed;
  p.exact_budget = exact_budget;
  return fraig( g, p );
}

} // namespace forge
