#pragma once

/*!
  \file equiv.hpp
  \brief Miter construction and combinational equivalence checking
*/

#include "aig.hpp"
#include "detail/rng.hpp"
#include "justify.hpp"
#include "netlist.hpp"

#include <json.hpp>

#include <bit>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge
{

class InterfaceMismatch : public std::invalid_argument
{
public:
  explicit InterfaceMismatch( std::vector<std::string> ports )
      : std::invalid_argument( describe( ports ) ), ports_( std::move( ports ) )
  {
  }
  std::vector<std::string> const& ports() const { return ports_; }

private:
  static std::string describe( std::vector<std::string> const& ports )
  {
    std::string s = "interface mismatch:";
    for ( auto const& p : ports )
      s += " " + p;
    return s;
  }
  std::vector<std::string> ports_;
};

/// Throws InterfaceMismatch unless a and b have the same PI and PO names in the same order.
inline void require_same_interface( Netlist const& a, Netlist const& b )
{
  std::vector<std::string> diff;
  auto compare = [&]( std::vector<NetId> const& pa, std::vector<NetId> const& pb, char const* kind ) {
    auto const n = std::max( pa.size(), pb.size() );
    for ( std::size_t k = 0; k < n; ++k )
    {
      auto const na = k < pa.size() ? a.net_name( pa[k] ) : std::string( "<none>" );
      auto const nb = k < pb.size() ? b.net_name( pb[k] ) : std::string( "<none>" );
      if ( na != nb )
        diff.push_back( std::string( kind ) + "[" + std::to_string( k ) + "]:" + na + "/" + nb );
    }
  };
  compare( a.inputs, b.inputs, "input" );
  compare( a.outputs, b.outputs, "output" );
  if ( !diff.empty() )
    throw InterfaceMismatch( std::move( diff ) );
}

struct Miter
{
  Netlist netlist; ///< shared PIs, one output named "miter"
};

/* Copies of a and b (internal nets prefixed "a$"/"b$") feeding one XOR
 * per output pair and a chain of ORs. */
inline Miter build_miter( Netlist const& a, Netlist const& b )
{
  require_same_interface( a, b );
  Miter m;
  auto& n = m.netlist;
  n.name = "miter";
  for ( auto pi : a.inputs )
    n.add_input( a.net_name( pi ) );

  auto copy = [&]( Netlist const& src, std::string const& prefix ) {
    std::vector<NetId> map( src.num_nets() );
    for ( NetId id = 0; id < src.num_nets(); ++id )
    {
      if ( src.is_constant( id ) )
        map[id] = n.constant( *src.constant_value( id ) );
      else if ( std::find( src.inputs.begin(), src.inputs.end(), id ) != src.inputs.end() )
        map[id] = n.net( src.net_name( id ) );
      else
        map[id] = n.net( prefix + src.net_name( id ) );
    }
    for ( auto const& g : src.gates )
    {
      std::vector<NetId> fanins;
      for ( auto x : g.inputs )
        fanins.push_back( map[x] );
      n.add_gate( g.kind, fanins, n.net_name( map[g.output] ), prefix + g.name );
    }
    std::vector<NetId> outs;
    for ( auto po : src.outputs )
      outs.push_back( map[po] );
    return outs;
  };
  auto const oa = copy( a, "a$" );
  auto const ob = copy( b, "b$" );

  std::vector<NetId> diffs;
  for ( std::size_t k = 0; k < oa.size(); ++k )
  {
    auto const name = oa.size() == 1 ? std::string( "miter" ) : "diff$" + std::to_string( k );
    n.add_gate( GateKind::xor_, { oa[k], ob[k] }, name, "mx" + std::to_string( k ) );
    diffs.push_back( n.net( name ) );
  }
  if ( diffs.empty() )
  {
    n.add_gate( GateKind::buf, { n.constant( false ) }, "miter", "mz" );
    diffs.push_back( n.net( "miter" ) );
  }
  NetId acc = diffs[0];
  for ( std::size_t k = 1; k < diffs.size(); ++k )
  {
    auto const name = k + 1 == diffs.size() ? std::string( "miter" ) : "any$" + std::to_string( k );
    n.add_gate( GateKind::or_, { acc, diffs[k] }, name, "mo" + std::to_string( k ) );
    acc = n.net( name );
  }
  n.add_output( "miter" );
  return m;
}

enum class EquivMode
{
  exhaustive,
  sampled,
  search
};

enum class EquivResult
{
  equivalent,
  no_mismatch_found,
  counterexample
};

inline std::string to_string( EquivMode m )
{
  return m == EquivMode::exhaustive ? "exhaustive" : m == EquivMode::sampled ? "sampled" : "search";
}

inline std::string to_string( EquivResult r )
{
  return r == EquivResult::equivalent ? "equivalent"
         : r == EquivResult::no_mismatch_found ? "no-mismatch-found"
                                               : "counterexample";
}

struct EquivConfig
{
  uint32_t exhaustive_bound = 24;
  uint64_t vectors = 100000;
  uint64_t seed = 0;
  /// Backtrack budget for a search after sampling; 0 disables it.
  uint64_t search_budget = 0;
};

struct EquivVerdict
{
  EquivMode mode = EquivMode::exhaustive;
  EquivResult result = EquivResult::equivalent;
  uint64_t vectors = 0; ///< vectors simulated
  std::optional<Assignment> counterexample;

  bool equivalent() const { return result == EquivResult::equivalent; }
  bool refuted() const { return result == EquivResult::counterexample; }
};

inline nlohmann::json to_json( EquivVerdict const& v )
{
  nlohmann::json j;
  j["mode"] = to_string( v.mode );
  j["result"] = to_string( v.result );
  j["vectors"] = v.vectors;
  if ( v.counterexample )
  {
    nlohmann::json ce = nlohmann::json::object();
    for ( auto const& [k, b] : *v.counterexample )
      ce[k] = b ? 1 : 0;
    j["counterexample"] = ce;
  }
  return j;
}

namespace detail
{

/// A single AIG holding both circuits over shared PIs; POs are the per-output differences.
inline AigGraph difference_aig( Netlist const& a, Netlist const& b )
{
  auto const ga = to_aig( a ), gb = to_aig( b );
  AigGraph g( "miter" );
  for ( uint32_t k = 0; k < ga.num_pis(); ++k )
    g.create_pi( ga.pi_name( k ) );
  AigBuilder builder( g );
  auto import = [&]( AigGraph const& src ) {
    std::vector<AigEdge> map( src.size() );
    map[0] = aig_true;
    for ( uint32_t i = 1; i <= src.num_pis(); ++i )
      map[i] = AigEdge( i, false );
    for ( uint32_t i = src.num_pis() + 1; i < src.size(); ++i )
    {
      auto const f0 = src.fanin0( i ), f1 = src.fanin1( i );
      map[i] = builder.land( map[f0.index()] ^ f0.complemented(), map[f1.index()] ^ f1.complemented() );
    }
    std::vector<AigEdge> outs;
    for ( auto po : src.pos() )
      outs.push_back( map[po.index()] ^ po.complemented() );
    return outs;
  };
  auto const oa = import( ga );
  auto const ob = import( gb );
  for ( std::size_t k = 0; k < oa.size(); ++k )
    g.create_po( builder.lxor( oa[k], ob[k] ), "d" + std::to_string( k ) );
  return g;
}

inline bool confirms_mismatch( Netlist const& a, Netlist const& b, Assignment const& v )
{
  auto const ra = simulate( a, v ), rb = simulate( b, v );
  for ( auto po : a.outputs )
    if ( ra.at( a.net_name( po ) ) != rb.at( a.net_name( po ) ) )
      return true;
  return false;
}

/* Simulates the difference AIG over the given patterns (one row of
 * `words` per PI) and returns the index of the first mismatching
 * pattern, if any. */
inline std::optional<uint64_t> first_mismatch( AigGraph const& d, std::span<uint64_t const> pi, std::size_t words,
                                               uint64_t valid_bits )
{
  auto const v = aig_simulate( d, pi, words );
  for ( std::size_t w = 0; w < words; ++w )
  {
    uint64_t diff = 0;
    for ( auto po : d.pos() )
      diff |= v[po.index() * words + w] ^ ( po.complemented() ? ~uint64_t{ 0 } : 0 );
    if ( ( w + 1 ) * 64 > valid_bits )
      diff &= valid_bits > w * 64 ? tail_mask( valid_bits - w * 64 ) : 0;
    if ( diff )
      return w * 64 + static_cast<uint64_t>( std::countr_zero( diff ) );
  }
  return std::nullopt;
}

inline Assignment assignment_from_bits( Netlist const& n, std::span<uint64_t const> pi, std::size_t words,
                                        uint64_t bit )
{
  return pattern_assignment( n, pi, words, bit );
}

} // namespace detail

/* Exhaustive when the PI count is within the bound, otherwise random
 * vectors (optionally followed by a bounded search on the miter).  Any
 * counterexample is re-simulated on the original netlists. */
inline EquivVerdict check_equivalence( Netlist const& a, Netlist const& b, EquivConfig const& cfg = {} )
{
  require_same_interface( a, b );
  auto const d = detail::difference_aig( a, b );
  auto const npi = a.inputs.size();
  EquivVerdict verdict;

  auto found = [&]( Assignment ce ) {
    if ( !detail::confirms_mismatch( a, b, ce ) )
      throw std::logic_error( "equivalence checker produced a spurious counterexample" );
    verdict.result = EquivResult::counterexample;
    verdict.counterexample = std::move( ce );
    return verdict;
  };

  if ( npi <= cfg.exhaustive_bound )
  {
    verdict.mode = EquivMode::exhaustive;
    uint64_t const total_bits = uint64_t{ 1 } << npi;
    uint64_t const total_words = detail::words_for( total_bits );
    uint64_t const chunk = std::min<uint64_t>( total_words, 256 );
    std::vector<uint64_t> pi( npi * chunk );
    for ( uint64_t first = 0; first < total_words; first += chunk )
    {
      auto const words = std::min( chunk, total_words - first );
      pi.resize( npi * words );
      detail::exhaustive_patterns( npi, first, words, pi );
      auto const bits = std::min<uint64_t>( words * 64, total_bits - first * 64 );
      verdict.vectors += bits;
      if ( auto m = detail::first_mismatch( d, pi, words, bits ) )
        return found( detail::assignment_from_bits( a, pi, words, *m ) );
    }
    verdict.result = EquivResult::equivalent;
    return verdict;
  }

  verdict.mode = EquivMode::sampled;
  Rng rng( cfg.seed );
  uint64_t remaining = cfg.vectors;
  std::vector<uint64_t> pi;
  while ( remaining > 0 )
  {
    auto const bits = std::min<uint64_t>( remaining, 64 * 256 );
    auto const words = detail::words_for( bits );
    pi.resize( npi * words );
    detail::random_patterns( rng, npi, words, pi );
    verdict.vectors += bits;
    remaining -= bits;
    if ( auto m = detail::first_mismatch( d, pi, words, bits ) )
      return found( detail::assignment_from_bits( a, pi, words, *m ) );
  }
  verdict.result = EquivResult::no_mismatch_found;

  if ( cfg.search_budget > 0 )
  {
    /* any PO difference set to 1 */
    AigGraph g = d;
    AigBuilder builder( g );
    AigEdge any = aig_false;
    for ( auto po : d.pos() )
      any = builder.lor( any, po );
    std::vector<AigEdge> targets{ any };
    SearchOptions opt;
    opt.budget = cfg.search_budget;
    opt.seed = cfg.seed;
    auto const r = justify( g, targets, opt );
    if ( r.status == SearchStatus::unsatisfiable )
    {
      verdict.mode = EquivMode::search;
      verdict.result = EquivResult::equivalent;
    }
    else if ( r.status == SearchStatus::satisfiable )
    {
      verdict.mode = EquivMode::search;
      Assignment ce;
      for ( std::size_t k = 0; k < npi; ++k )
        ce[a.net_name( a.inputs[k] )] = r.pi_values[k] != 0;
      return found( std::move( ce ) );
    }
  }
  return verdict;
}

} // namespace forge
