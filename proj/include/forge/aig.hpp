#pragma once

/*!
  \file aig.hpp
  \brief And-inverter graphs

  Node 0 is the constant-true node, nodes 1..num_pis() are primary
  inputs, and AND nodes follow in topological order (every fanin index is
  smaller than the node's own index).  Complement attributes live on
  edges.
*/

#include "detail/bits.hpp"
#include "netlist.hpp"
#include "truth_table.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace forge
{

/// Edge to an AIG node, optionally complemented; encoded as 2*index + complement.
class AigEdge
{
public:
  constexpr AigEdge() = default;
  constexpr AigEdge( uint32_t index, bool complemented ) : raw_( 2 * index + ( complemented ? 1u : 0u ) ) {}

  static constexpr AigEdge from_raw( uint32_t raw )
  {
    AigEdge e;
    e.raw_ = raw;
    return e;
  }

  constexpr uint32_t index() const { return raw_ >> 1; }
  constexpr bool complemented() const { return raw_ & 1u; }
  constexpr uint32_t raw() const { return raw_; }
  constexpr AigEdge regular() const { return from_raw( raw_ & ~1u ); }

  constexpr AigEdge operator!() const { return from_raw( raw_ ^ 1u ); }
  constexpr AigEdge operator^( bool c ) const { return from_raw( raw_ ^ ( c ? 1u : 0u ) ); }

  friend constexpr bool operator==( AigEdge, AigEdge ) = default;
  friend constexpr auto operator<=>( AigEdge a, AigEdge b ) { return a.raw_ <=> b.raw_; }

private:
  uint32_t raw_ = 0;
};

inline constexpr AigEdge aig_true{ 0, false };
inline constexpr AigEdge aig_false{ 0, true };

struct AigNode
{
  AigEdge fanin0;
  AigEdge fanin1;
  uint32_t level = 0;
};

class AigGraph
{
public:
  AigGraph() { nodes_.push_back( AigNode{} ); }
  explicit AigGraph( std::string name ) : AigGraph() { name_ = std::move( name ); }

  AigEdge create_pi( std::string name )
  {
    if ( num_ands() != 0 )
      throw std::logic_error( "primary inputs must be created before AND nodes" );
    nodes_.push_back( AigNode{} );
    pi_names_.push_back( std::move( name ) );
    return AigEdge( static_cast<uint32_t>( nodes_.size() - 1 ), false );
  }

  /// Appends an AND node without hashing or simplification; fanins are normalized.
  AigEdge create_and( AigEdge a, AigEdge b )
  {
    if ( b < a )
      std::swap( a, b );
    auto const lvl = 1 + std::max( nodes_[a.index()].level, nodes_[b.index()].level );
    nodes_.push_back( AigNode{ a, b, lvl } );
    return AigEdge( static_cast<uint32_t>( nodes_.size() - 1 ), false );
  }

  void create_po( AigEdge e, std::string name )
  {
    pos_.push_back( e );
    po_names_.push_back( std::move( name ) );
    depth_ = std::max( depth_, nodes_[e.index()].level );
  }

  void set_po( std::size_t k, AigEdge e )
  {
    pos_[k] = e;
    depth_ = 0;
    for ( auto po : pos_ )
      depth_ = std::max( depth_, nodes_[po.index()].level );
  }

  std::string const& name() const { return name_; }
  void set_name( std::string n ) { name_ = std::move( n ); }

  uint32_t size() const { return static_cast<uint32_t>( nodes_.size() ); }
  uint32_t num_pis() const { return static_cast<uint32_t>( pi_names_.size() ); }
  uint32_t num_pos() const { return static_cast<uint32_t>( pos_.size() ); }
  uint32_t num_ands() const { return size() - 1 - num_pis(); }

  bool is_constant( uint32_t i ) const { return i == 0; }
  bool is_pi( uint32_t i ) const { return i >= 1 && i <= num_pis(); }
  bool is_and( uint32_t i ) const { return i > num_pis(); }

  AigEdge pi( uint32_t k ) const { return AigEdge( k + 1, false ); }
  AigEdge po( uint32_t k ) const { return pos_[k]; }
  std::vector<AigEdge> const& pos() const { return pos_; }
  std::string const& pi_name( uint32_t k ) const { return pi_names_[k]; }
  std::string const& po_name( uint32_t k ) const { return po_names_[k]; }
  std::vector<std::string> const& pi_names() const { return pi_names_; }
  std::vector<std::string> const& po_names() const { return po_names_; }

  AigNode const& node( uint32_t i ) const { return nodes_[i]; }
  AigEdge fanin0( uint32_t i ) const { return nodes_[i].fanin0; }
  AigEdge fanin1( uint32_t i ) const { return nodes_[i].fanin1; }
  uint32_t level( uint32_t i ) const { return nodes_[i].level; }
  uint32_t depth() const { return depth_; }

  /// Node-for-node structural equality (names included).
  friend bool operator==( AigGraph const& a, AigGraph const& b )
  {
    if ( a.nodes_.size() != b.nodes_.size() || a.pos_ != b.pos_ || a.pi_names_ != b.pi_names_ ||
         a.po_names_ != b.po_names_ )
      return false;
    for ( std::size_t i = 0; i < a.nodes_.size(); ++i )
      if ( a.nodes_[i].fanin0 != b.nodes_[i].fanin0 || a.nodes_[i].fanin1 != b.nodes_[i].fanin1 )
        return false;
    return true;
  }

private:
  std::string name_;
  std::vector<AigNode> nodes_;
  std::vector<std::string> pi_names_, po_names_;
  std::vector<AigEdge> pos_;
  uint32_t depth_ = 0;
};

/// Copies the PI interface (names, order) of `g` into a fresh graph.
inline AigGraph clone_interface( AigGraph const& g )
{
  AigGraph out( g.name() );
  for ( uint32_t k = 0; k < g.num_pis(); ++k )
    out.create_pi( g.pi_name( k ) );
  return out;
}

/// Hashing front end: one-level structural hashing plus constant propagation.
class AigBuilder
{
public:
  explicit AigBuilder( AigGraph& g ) : g_( &g )
  {
    for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
      table_.emplace( key( g.fanin0( i ), g.fanin1( i ) ), i );
  }

  AigGraph& graph() { return *g_; }

  AigEdge land( AigEdge a, AigEdge b )
  {
    if ( b < a )
      std::swap( a, b );
    if ( a == aig_false || b == aig_false || a == !b )
      return aig_false;
    if ( a == aig_true )
      return b;
    if ( b == aig_true || a == b )
      return a;
    auto const k = key( a, b );
    if ( auto it = table_.find( k ); it != table_.end() )
      return AigEdge( it->second, false );
    auto const e = g_->create_and( a, b );
    table_.emplace( k, e.index() );
    return e;
  }

  /// Existing node for AND(a, b) after normalization, if any (constants fold).
  std::optional<AigEdge> lookup( AigEdge a, AigEdge b ) const
  {
    if ( b < a )
      std::swap( a, b );
    if ( a == aig_false || b == aig_false || a == !b )
      return aig_false;
    if ( a == aig_true )
      return b;
    if ( b == aig_true || a == b )
      return a;
    if ( auto it = table_.find( key( a, b ) ); it != table_.end() )
      return AigEdge( it->second, false );
    return std::nullopt;
  }

  AigEdge lor( AigEdge a, AigEdge b ) { return !land( !a, !b ); }
  AigEdge lxor( AigEdge a, AigEdge b ) { return land( !land( a, b ), !land( !a, !b ) ); }

  /// Conjunction of several edges, pairing the two shallowest operands first.
  AigEdge land_balanced( std::vector<AigEdge> ops )
  {
    if ( ops.empty() )
      return aig_true;
    while ( ops.size() > 1 )
    {
      std::stable_sort( ops.begin(), ops.end(), [&]( AigEdge x, AigEdge y ) {
        return g_->level( x.index() ) > g_->level( y.index() );
      } );
      auto const a = ops.back();
      ops.pop_back();
      auto const b = ops.back();
      ops.pop_back();
      ops.push_back( land( a, b ) );
    }
    return ops.front();
  }

private:
  static uint64_t key( AigEdge a, AigEdge b ) { return ( uint64_t{ a.raw() } << 32 ) | b.raw(); }

  AigGraph* g_;
  std::unordered_map<uint64_t, uint32_t> table_;
};

/* --------------------------------------------------------------------
 * Structural hashing
 * ------------------------------------------------------------------ */

/// Drops AND nodes unreachable from the outputs; relative order is kept.
inline AigGraph remove_dangling( AigGraph const& g )
{
  std::vector<uint8_t> live( g.size(), 0 );
  for ( auto po : g.pos() )
    live[po.index()] = 1;
  for ( uint32_t i = g.size(); i-- > g.num_pis() + 1; )
    if ( live[i] )
    {
      live[g.fanin0( i ).index()] = 1;
      live[g.fanin1( i ).index()] = 1;
    }
  auto out = clone_interface( g );
  std::vector<AigEdge> map( g.size() );
  for ( uint32_t i = 0; i <= g.num_pis(); ++i )
    map[i] = AigEdge( i, false );
  for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
    if ( live[i] )
      map[i] = out.create_and( map[g.fanin0( i ).index()] ^ g.fanin0( i ).complemented(),
                               map[g.fanin1( i ).index()] ^ g.fanin1( i ).complemented() );
  for ( uint32_t k = 0; k < g.num_pos(); ++k )
    out.create_po( map[g.po( k ).index()] ^ g.po( k ).complemented(), g.po_name( k ) );
  return out;
}

/// Structurally hashed, constant-propagated copy without dangling nodes.
inline AigGraph strash( AigGraph const& g )
{
  auto out = clone_interface( g );
  AigBuilder b( out );
  std::vector<AigEdge> map( g.size() );
  for ( uint32_t i = 0; i <= g.num_pis(); ++i )
    map[i] = AigEdge( i, false );
  for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
    map[i] = b.land( map[g.fanin0( i ).index()] ^ g.fanin0( i ).complemented(),
                     map[g.fanin1( i ).index()] ^ g.fanin1( i ).complemented() );
  for ( uint32_t k = 0; k < g.num_pos(); ++k )
    out.create_po( map[g.po( k ).index()] ^ g.po( k ).complemented(), g.po_name( k ) );
  return remove_dangling( out );
}

/* --------------------------------------------------------------------
 * Netlist conversion
 * ------------------------------------------------------------------ */

/// Decomposes every gate into two-input ANDs with complemented edges (no hashing).
inline AigGraph to_aig( Netlist const& n )
{
  require_valid( n );
  auto const c = connectivity( n );
  AigGraph g( n.name );
  std::vector<AigEdge> map( n.num_nets(), aig_false );
  for ( auto pi : n.inputs )
    map[pi] = g.create_pi( n.net_name( pi ) );
  for ( NetId id = 0; id < n.num_nets(); ++id )
    if ( auto v = n.constant_value( id ) )
      map[id] = *v ? aig_true : aig_false;

  auto xor2 = [&]( AigEdge a, AigEdge b ) {
    auto const both = g.create_and( a, b );
    auto const neither = g.create_and( !a, !b );
    return g.create_and( !both, !neither );
  };

  for ( auto gi : c.order )
  {
    auto const& gate = n.gates[gi];
    std::vector<AigEdge> in;
    for ( auto x : gate.inputs )
      in.push_back( map[x] );
    AigEdge r;
    switch ( gate.kind )
    {
    case GateKind::buf:
      r = in[0];
      break;
    case GateKind::not_:
      r = !in[0];
      break;
    case GateKind::and_:
    case GateKind::nand:
      r = in[0];
      for ( std::size_t k = 1; k < in.size(); ++k )
        r = g.create_and( r, in[k] );
      r = r ^ ( gate.kind == GateKind::nand );
      break;
    case GateKind::or_:
    case GateKind::nor:
      r = !in[0];
      for ( std::size_t k = 1; k < in.size(); ++k )
        r = g.create_and( r, !in[k] );
      r = r ^ ( gate.kind == GateKind::or_ );
      break;
    case GateKind::xor_:
    case GateKind::xnor:
      r = in[0];
      for ( std::size_t k = 1; k < in.size(); ++k )
        r = xor2( r, in[k] );
      r = r ^ ( gate.kind == GateKind::xnor );
      break;
    }
    map[gate.output] = r;
  }
  for ( auto po : n.outputs )
    g.create_po( map[po], n.net_name( po ) );
  return g;
}

struct FromAigOptions
{
  /// Collapse single-fanout, same-polarity AND trees into multi-input gates.
  bool group_and = false;
  /// Emit XOR/XNOR for the three-node exclusive-or pattern.
  bool detect_xor = false;
  /// Emit NAND/NOR/OR where the output or all operands are complemented.
  bool inverting_gates = false;

  friend bool operator==( FromAigOptions const&, FromAigOptions const& ) = default;
};

/// Writes an AIG back to the eight-gate netlist form; PI/PO names and order are kept.
inline Netlist from_aig( AigGraph const& g, FromAigOptions const& opt = {} )
{
  auto const size = g.size();
  std::vector<uint32_t> refs( size, 0 ), po_refs( size, 0 );
  std::vector<uint8_t> live( size, 0 );
  for ( auto po : g.pos() )
  {
    live[po.index()] = 1;
    ++po_refs[po.index()];
  }
  for ( uint32_t i = size; i-- > g.num_pis() + 1; )
    if ( live[i] )
    {
      live[g.fanin0( i ).index()] = 1;
      live[g.fanin1( i ).index()] = 1;
    }
  for ( uint32_t i = g.num_pis() + 1; i < size; ++i )
    if ( live[i] )
    {
      ++refs[g.fanin0( i ).index()];
      ++refs[g.fanin1( i ).index()];
    }
  for ( uint32_t i = 0; i < size; ++i )
    refs[i] += po_refs[i];

  /* exclusive-or pattern: x = !(p & q) & !(!p & !q) with private inner nodes */
  std::vector<std::pair<AigEdge, AigEdge>> xor_of( size );
  std::vector<uint8_t> is_xor( size, 0 ), absorbed( size, 0 );
  if ( opt.detect_xor )
  {
    for ( uint32_t i = g.num_pis() + 1; i < size; ++i )
    {
      if ( !live[i] )
        continue;
      auto const f0 = g.fanin0( i ), f1 = g.fanin1( i );
      if ( !f0.complemented() || !f1.complemented() )
        continue;
      auto const a = f0.index(), b = f1.index();
      if ( !g.is_and( a ) || !g.is_and( b ) || refs[a] != 1 || refs[b] != 1 || absorbed[a] || absorbed[b] )
        continue;
      if ( g.fanin0( a ) == !g.fanin0( b ) && g.fanin1( a ) == !g.fanin1( b ) )
      {
        is_xor[i] = 1;
        absorbed[a] = absorbed[b] = 1;
        xor_of[i] = { g.fanin0( a ), g.fanin1( a ) };
      }
    }
  }

  /* operands of each AND gate, expanding private positive AND fanins when grouping */
  std::vector<std::vector<AigEdge>> operands( size );
  auto expand = [&]( auto&& self, AigEdge e, std::vector<AigEdge>& acc ) -> void {
    auto const j = e.index();
    if ( opt.group_and && !e.complemented() && g.is_and( j ) && refs[j] == 1 && !is_xor[j] && !absorbed[j] )
    {
      absorbed[j] = 1;
      self( self, g.fanin0( j ), acc );
      self( self, g.fanin1( j ), acc );
    }
    else
      acc.push_back( e );
  };
  for ( uint32_t i = size; i-- > g.num_pis() + 1; )
  {
    if ( !live[i] || absorbed[i] )
      continue;
    if ( is_xor[i] )
      operands[i] = { xor_of[i].first, xor_of[i].second };
    else
    {
      expand( expand, g.fanin0( i ), operands[i] );
      expand( expand, g.fanin1( i ), operands[i] );
    }
  }

  /* emitted nodes and the polarity in which their net is produced */
  std::vector<uint8_t> emitted( size, 0 );
  std::vector<uint32_t> pos_uses( size, 0 ), neg_uses( size, 0 );
  for ( uint32_t i = g.num_pis() + 1; i < size; ++i )
    if ( live[i] && !absorbed[i] )
    {
      emitted[i] = 1;
      for ( auto e : operands[i] )
        ++( e.complemented() ? neg_uses : pos_uses )[e.index()];
    }
  for ( auto po : g.pos() )
    ++( po.complemented() ? neg_uses : pos_uses )[po.index()];
  std::vector<uint8_t> inverted( size, 0 );
  if ( opt.inverting_gates )
    for ( uint32_t i = g.num_pis() + 1; i < size; ++i )
      inverted[i] = emitted[i] && neg_uses[i] > 0 && pos_uses[i] == 0;

  Netlist n( g.name() );
  std::set<std::string> taken( g.pi_names().begin(), g.pi_names().end() );
  taken.insert( g.po_names().begin(), g.po_names().end() );
  auto fresh = [&]( std::string base ) {
    while ( taken.count( base ) )
      base += "_";
    taken.insert( base );
    return base;
  };

  for ( uint32_t k = 0; k < g.num_pis(); ++k )
    n.add_input( g.pi_name( k ) );

  /* the first PO referencing an emitted node in its produced polarity names that net */
  std::vector<int32_t> claimed_by( size, -1 );
  std::vector<uint8_t> po_claims( g.num_pos(), 0 );
  for ( uint32_t k = 0; k < g.num_pos(); ++k )
  {
    auto const e = g.po( k );
    if ( emitted[e.index()] && claimed_by[e.index()] < 0 && e.complemented() == static_cast<bool>( inverted[e.index()] ) )
    {
      claimed_by[e.index()] = static_cast<int32_t>( k );
      po_claims[k] = 1;
    }
  }

  std::vector<NetId> net_of( size, 0 ), inv_net_of( size, 0 );
  std::vector<uint8_t> has_inv( size, 0 );
  for ( uint32_t k = 0; k < g.num_pis(); ++k )
    net_of[k + 1] = n.inputs[k];
  uint32_t gate_counter = 0;
  auto gate_name = [&]() { return fresh( "g" + std::to_string( gate_counter++ ) ); };

  /* net carrying the function of edge `e` */
  auto signal = [&]( AigEdge e ) -> NetId {
    auto const i = e.index();
    if ( i == 0 )
      return n.constant( !e.complemented() );
    bool const produced_inverted = g.is_and( i ) && inverted[i];
    if ( e.complemented() == produced_inverted )
      return net_of[i];
    if ( !has_inv[i] )
    {
      has_inv[i] = 1;
      auto const name = fresh( "n" + std::to_string( i ) + ( produced_inverted ? "_p" : "_n" ) );
      inv_net_of[i] = n.add_gate( GateKind::not_, { net_of[i] }, name, gate_name() );
    }
    return inv_net_of[i];
  };

  for ( uint32_t i = g.num_pis() + 1; i < size; ++i )
  {
    if ( !emitted[i] )
      continue;
    auto const out_name = claimed_by[i] >= 0 ? g.po_name( claimed_by[i] ) : fresh( "n" + std::to_string( i ) );
    std::vector<NetId> ins;
    GateKind kind;
    if ( is_xor[i] )
    {
      bool parity = inverted[i];
      for ( auto e : operands[i] )
      {
        auto const j = e.index();
        bool const avail_inverted = g.is_and( j ) && inverted[j];
        if ( j != 0 && e.complemented() != avail_inverted && opt.inverting_gates )
        {
          /* use the available polarity and fold the inversion into the gate */
          ins.push_back( net_of[j] );
          parity = !parity;
        }
        else
          ins.push_back( signal( e ) );
      }
      kind = parity ? GateKind::xnor : GateKind::xor_;
    }
    else
    {
      bool const all_complemented = std::all_of( operands[i].begin(), operands[i].end(),
                                                 []( AigEdge e ) { return e.complemented() && e.index() != 0; } );
      if ( opt.inverting_gates && all_complemented )
      {
        for ( auto e : operands[i] )
          ins.push_back( signal( !e ) );
        kind = inverted[i] ? GateKind::or_ : GateKind::nor;
      }
      else
      {
        for ( auto e : operands[i] )
          ins.push_back( signal( e ) );
        kind = inverted[i] ? GateKind::nand : GateKind::and_;
      }
    }
    net_of[i] = n.add_gate( kind, std::move( ins ), out_name, gate_name() );
  }

  std::vector<NetId> outs;
  for ( uint32_t k = 0; k < g.num_pos(); ++k )
  {
    if ( po_claims[k] )
    {
      outs.push_back( net_of[g.po( k ).index()] );
      continue;
    }
    auto const e = g.po( k );
    auto const i = e.index();
    GateKind kind = GateKind::buf;
    NetId src;
    if ( i == 0 )
      src = n.constant( !e.complemented() );
    else
    {
      bool const produced_inverted = g.is_and( i ) && inverted[i];
      if ( e.complemented() != produced_inverted && !has_inv[i] )
        kind = GateKind::not_;
      src = kind == GateKind::not_ ? net_of[i] : signal( e );
    }
    outs.push_back( n.add_gate( kind, { src }, g.po_name( k ), gate_name() ) );
  }
  n.outputs = std::move( outs );
  return n;
}

/* --------------------------------------------------------------------
 * Simulation and cuts
 * ------------------------------------------------------------------ */

/* Bit-parallel simulation.  `pi_words` holds one row of `words` words per
 * PI; the result holds one row per node (node 0 is all ones).  Bit j of a
 * signature lives in word j/64 at bit position j%64 (little-endian). */
inline std::vector<uint64_t> aig_simulate( AigGraph const& g, std::span<uint64_t const> pi_words, std::size_t words )
{
  if ( pi_words.size() != std::size_t{ g.num_pis() } * words )
    throw std::invalid_argument( "stimulus width mismatch" );
  std::vector<uint64_t> sig( std::size_t{ g.size() } * words );
  std::fill_n( sig.begin(), words, ~uint64_t{ 0 } );
  std::copy( pi_words.begin(), pi_words.end(), sig.begin() + words );
  for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
  {
    auto const f0 = g.fanin0( i ), f1 = g.fanin1( i );
    uint64_t const m0 = f0.complemented() ? ~uint64_t{ 0 } : 0, m1 = f1.complemented() ? ~uint64_t{ 0 } : 0;
    auto const* a = &sig[f0.index() * words];
    auto const* b = &sig[f1.index() * words];
    auto* r = &sig[std::size_t{ i } * words];
    for ( std::size_t w = 0; w < words; ++w )
      r[w] = ( a[w] ^ m0 ) & ( b[w] ^ m1 );
  }
  return sig;
}

/// Signature of an edge given node signatures from aig_simulate.
inline void edge_signature( std::span<uint64_t const> sig, std::size_t words, AigEdge e, std::span<uint64_t> out )
{
  for ( std::size_t w = 0; w < words; ++w )
    out[w] = sig[e.index() * words + w] ^ ( e.complemented() ? ~uint64_t{ 0 } : 0 );
}

/// Truth tables of all primary outputs over all primary inputs.
inline std::vector<TruthTable> aig_truth_tables( AigGraph const& g )
{
  if ( g.num_pis() > max_truth_table_vars )
    throw std::invalid_argument( "too many inputs for truth tables" );
  auto const words = std::max<std::size_t>( 1, detail::words_for( uint64_t{ 1 } << g.num_pis() ) );
  std::vector<uint64_t> pi( std::size_t{ g.num_pis() } * words );
  detail::exhaustive_patterns( g.num_pis(), 0, words, pi );
  auto const sig = aig_simulate( g, pi, words );
  std::vector<TruthTable> out;
  for ( auto po : g.pos() )
  {
    TruthTable t( g.num_pis() );
    edge_signature( sig, words, po, t.words() );
    if ( g.num_pis() < 6 )
      t.words()[0] &= ( uint64_t{ 1 } << ( 1u << g.num_pis() ) ) - 1;
    out.push_back( std::move( t ) );
  }
  return out;
}

/// A cut: at most six leaves (sorted node indices) with the node's function over them.
struct Cut
{
  std::vector<uint32_t> leaves;
  uint64_t truth = 0; ///< bit m = value under leaf assignment m (leaf k is bit k of m)

  friend bool operator==( Cut const&, Cut const& ) = default;
};

using CutSet = std::vector<std::vector<Cut>>;

namespace detail
{

/// Re-expresses `truth` over `from` as a function over the superset `to`.
inline uint64_t stretch_truth( uint64_t truth, std::vector<uint32_t> const& from, std::vector<uint32_t> const& to )
{
  std::vector<uint32_t> pos( from.size() );
  for ( std::size_t k = 0; k < from.size(); ++k )
    pos[k] = static_cast<uint32_t>( std::find( to.begin(), to.end(), from[k] ) - to.begin() );
  uint64_t out = 0;
  for ( uint32_t m = 0; m < ( 1u << to.size() ); ++m )
  {
    uint32_t sub = 0;
    for ( std::size_t k = 0; k < from.size(); ++k )
      sub |= ( ( m >> pos[k] ) & 1u ) << k;
    out |= ( ( truth >> sub ) & 1u ) << m;
  }
  return out;
}

inline uint64_t truth_mask( std::size_t num_leaves )
{
  return num_leaves >= 6 ? ~uint64_t{ 0 } : ( uint64_t{ 1 } << ( 1u << num_leaves ) ) - 1;
}

} // namespace detail

/* Enumerates up to `max_cuts` cuts of at most `k` leaves per node
 * (smallest leaf count first), plus the trivial cut of the node itself
 * which is always stored first. */
inline CutSet enumerate_cuts( AigGraph const& g, uint32_t k = 6, uint32_t max_cuts = 8 )
{
  if ( k > 6 || k < 2 )
    throw std::invalid_argument( "cut size must be within [2, 6]" );
  CutSet cuts( g.size() );
  cuts[0] = { Cut{ {}, 1 } };
  for ( uint32_t i = 1; i < g.size(); ++i )
  {
    Cut trivial{ { i }, 0x2 };
    if ( g.is_pi( i ) )
    {
      cuts[i] = { trivial };
      continue;
    }
    auto const f0 = g.fanin0( i ), f1 = g.fanin1( i );
    std::vector<Cut> found;
    for ( auto const& a : cuts[f0.index()] )
      for ( auto const& b : cuts[f1.index()] )
      {
        std::vector<uint32_t> leaves;
        std::set_union( a.leaves.begin(), a.leaves.end(), b.leaves.begin(), b.leaves.end(),
                        std::back_inserter( leaves ) );
        if ( leaves.size() > k )
          continue;
        auto const mask = detail::truth_mask( leaves.size() );
        auto ta = detail::stretch_truth( a.truth, a.leaves, leaves );
        auto tb = detail::stretch_truth( b.truth, b.leaves, leaves );
        if ( f0.complemented() )
          ta = ~ta;
        if ( f1.complemented() )
          tb = ~tb;
        Cut c{ std::move( leaves ), ta & tb & mask };
        bool dominated = false;
        for ( auto const& other : found )
          if ( std::includes( c.leaves.begin(), c.leaves.end(), other.leaves.begin(), other.leaves.end() ) )
          {
            dominated = true;
            break;
          }
        if ( dominated )
          continue;
        std::erase_if( found, [&]( Cut const& other ) {
          return std::includes( other.leaves.begin(), other.leaves.end(), c.leaves.begin(), c.leaves.end() );
        } );
        found.push_back( std::move( c ) );
      }
    std::stable_sort( found.begin(), found.end(), []( Cut const& x, Cut const& y ) {
      return x.leaves.size() != y.leaves.size() ? x.leaves.size() < y.leaves.size() : x.leaves < y.leaves;
    } );
    if ( found.size() > max_cuts )
      found.resize( max_cuts );
    cuts[i].push_back( trivial );
    for ( auto& c : found )
      cuts[i].push_back( std::move( c ) );
  }
  return cuts;
}

/* --------------------------------------------------------------------
 * AIGER export
 * ------------------------------------------------------------------ */

namespace detail
{

/// AIGER literal of an edge (AIGER literal 0 is constant false).
inline uint32_t aiger_literal( AigEdge e ) { return e.index() == 0 ? ( e.complemented() ? 0u : 1u ) : e.raw(); }

} // namespace detail

/// ASCII AIGER ("aag") text with a symbol table.
inline std::string write_aiger_ascii( AigGraph const& g )
{
  auto const m = g.size() - 1;
  std::string out = "aag " + std::to_string( m ) + " " + std::to_string( g.num_pis() ) + " 0 " +
                    std::to_string( g.num_pos() ) + " " + std::to_string( g.num_ands() ) + "\n";
  for ( uint32_t k = 0; k < g.num_pis(); ++k )
    out += std::to_string( 2 * ( k + 1 ) ) + "\n";
  for ( auto po : g.pos() )
    out += std::to_string( detail::aiger_literal( po ) ) + "\n";
  for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
  {
    auto const a = detail::aiger_literal( g.fanin0( i ) ), b = detail::aiger_literal( g.fanin1( i ) );
    out += std::to_string( 2 * i ) + " " + std::to_string( std::max( a, b ) ) + " " +
           std::to_string( std::min( a, b ) ) + "\n";
  }
  for ( uint32_t k = 0; k < g.num_pis(); ++k )
    out += "i" + std::to_string( k ) + " " + g.pi_name( k ) + "\n";
  for ( uint32_t k = 0; k < g.num_pos(); ++k )
    out += "o" + std::to_string( k ) + " " + g.po_name( k ) + "\n";
  out += "c\n" + g.name() + "\n";
  return out;
}

/// Binary AIGER ("aig") bytes with delta-encoded AND gates and a symbol table.
inline std::string write_aiger_binary( AigGraph const& g )
{
  auto const m = g.size() - 1;
  std::string out = "aig " + std::to_string( m ) + " " + std::to_string( g.num_pis() ) + " 0 " +
                    std::to_string( g.num_pos() ) + " " + std::to_string( g.num_ands() ) + "\n";
  for ( auto po : g.pos() )
    out += std::to_string( detail::aiger_literal( po ) ) + "\n";
  auto encode = [&]( uint32_t x ) {
    while ( x & ~0x7fu )
    {
      out.push_back( static_cast<char>( ( x & 0x7fu ) | 0x80u ) );
      x >>= 7;
    }
    out.push_back( static_cast<char>( x ) );
  };
  for ( uint32_t i = g.num_pis() + 1; i < g.size(); ++i )
  {
    auto const a = detail::aiger_literal( g.fanin0( i ) ), b = detail::aiger_literal( g.fanin1( i ) );
    auto const hi = std::max( a, b ), lo = std::min( a, b );
    encode( 2 * i - hi );
    encode( hi - lo );
  }
  for ( uint32_t k = 0; k < g.num_pis(); ++k )
    out += "i" + std::to_string( k ) + " " + g.pi_name( k ) + "\n";
  for ( uint32_t k = 0; k < g.num_pos(); ++k )
    out += "o" + std::to_string( k ) + " " + g.po_name( k ) + "\n";
  out += "c\n" + g.name() + "\n";
  return out;
}

} // namespace forge
