#pragma once

// Test-only reference implementations.  Nothing here calls into the
// simulation or synthesis code paths it is used to check.

#include <forge/netlist.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace oracle
{

/// Boolean value of one gate kind, written out case by case.
inline bool gate_value( forge::GateKind kind, std::vector<bool> const& in )
{
  using forge::GateKind;
  switch ( kind )
  {
  case GateKind::buf:
    return in.at( 0 );
  case GateKind::not_:
    return !in.at( 0 );
  case GateKind::and_:
  {
    bool v = true;
    for ( bool b : in )
      v = v && b;
    return v;
  }
  case GateKind::nand:
    return !gate_value( GateKind::and_, in );
  case GateKind::or_:
  {
    bool v = false;
    for ( bool b : in )
      v = v || b;
    return v;
  }
  case GateKind::nor:
    return !gate_value( GateKind::or_, in );
  case GateKind::xor_:
  {
    int ones = 0;
    for ( bool b : in )
      ones += b ? 1 : 0;
    return ones % 2 == 1;
  }
  case GateKind::xnor:
    return !gate_value( GateKind::xor_, in );
  }
  return false;
}

/// Memoized recursive evaluation by net name for one input row.
inline std::map<std::string, bool> evaluate( forge::Netlist const& n, uint64_t row )
{
  std::map<forge::NetId, int> driver;
  for ( int g = 0; g < static_cast<int>( n.gates.size() ); ++g )
    driver[n.gates[g].output] = g;
  std::map<forge::NetId, bool> value;
  for ( std::size_t i = 0; i < n.inputs.size(); ++i )
    value[n.inputs[i]] = ( row >> i ) & 1u;

  std::function<bool( forge::NetId )> get = [&]( forge::NetId id ) -> bool {
    if ( auto it = value.find( id ); it != value.end() )
      return it->second;
    if ( n.net_name( id ) == "1'b0" )
      return value[id] = false;
    if ( n.net_name( id ) == "1'b1" )
      return value[id] = true;
    auto const& gate = n.gates.at( driver.at( id ) );
    std::vector<bool> in;
    for ( auto x : gate.inputs )
      in.push_back( get( x ) );
    return value[id] = gate_value( gate.kind, in );
  };

  std::map<std::string, bool> out;
  for ( forge::NetId id = 0; id < n.num_nets(); ++id )
    if ( driver.count( id ) || n.net_name( id ) == "1'b0" || n.net_name( id ) == "1'b1" ||
         std::find( n.inputs.begin(), n.inputs.end(), id ) != n.inputs.end() )
      out[n.net_name( id )] = get( id );
  return out;
}

/// Output rows as bit strings over all 2^PI inputs (PI count must be small).
inline std::vector<std::string> truth_table( forge::Netlist const& n )
{
  std::vector<std::string> rows;
  for ( uint64_t row = 0; row < ( uint64_t{ 1 } << n.inputs.size() ); ++row )
  {
    auto const v = evaluate( n, row );
    std::string bits;
    for ( auto po : n.outputs )
      bits += v.at( n.net_name( po ) ) ? '1' : '0';
    rows.push_back( bits );
  }
  return rows;
}

/// PI name -> value for row `row`.
inline forge::Assignment row_assignment( forge::Netlist const& n, uint64_t row )
{
  forge::Assignment a;
  for ( std::size_t i = 0; i < n.inputs.size(); ++i )
    a[n.net_name( n.inputs[i] )] = ( row >> i ) & 1u;
  return a;
}

} // namespace oracle

#include <forge/aig.hpp>

namespace oracle
{

/// Recursive AIG evaluation of an edge for one PI row (no bit parallelism).
inline bool aig_value( forge::AigGraph const& g, forge::AigEdge e, uint64_t row )
{
  std::map<uint32_t, bool> memo;
  std::function<bool( uint32_t )> node = [&]( uint32_t i ) -> bool {
    if ( i == 0 )
      return true;
    if ( g.is_pi( i ) )
      return ( row >> ( i - 1 ) ) & 1u;
    if ( auto it = memo.find( i ); it != memo.end() )
      return it->second;
    auto const f0 = g.fanin0( i ), f1 = g.fanin1( i );
    bool const v = ( node( f0.index() ) != f0.complemented() ) && ( node( f1.index() ) != f1.complemented() );
    return memo[i] = v;
  };
  return node( e.index() ) != e.complemented();
}

/// PO rows of an AIG as bit strings, in the same layout as truth_table(Netlist).
inline std::vector<std::string> truth_table( forge::AigGraph const& g )
{
  std::vector<std::string> rows;
  for ( uint64_t row = 0; row < ( uint64_t{ 1 } << g.num_pis() ); ++row )
  {
    std::string bits;
    for ( auto po : g.pos() )
      bits += aig_value( g, po, row ) ? '1' : '0';
    rows.push_back( bits );
  }
  return rows;
}

} // namespace oracle

namespace oracle
{

struct Scoap
{
  std::map<std::string, int64_t> cc0, cc1, co;
};

/* SCOAP by direct recursion over net names.  Parity gates enumerate every
 * input assignment of the required parity instead of using a recurrence. */
inline Scoap scoap( forge::Netlist const& n )
{
  static constexpr int64_t cap = ( int64_t{ 1 } << 31 ) - 1;
  auto sat = []( int64_t v ) { return std::min( v, cap ); };
  std::map<forge::NetId, int> driver;
  std::map<forge::NetId, std::vector<std::pair<int, std::size_t>>> loads;
  for ( int g = 0; g < static_cast<int>( n.gates.size() ); ++g )
  {
    driver[n.gates[g].output] = g;
    for ( std::size_t k = 0; k < n.gates[g].inputs.size(); ++k )
      loads[n.gates[g].inputs[k]].push_back( { g, k } );
  }
  std::map<forge::NetId, std::pair<int64_t, int64_t>> cc;
  std::function<std::pair<int64_t, int64_t>( forge::NetId )> ctrl = [&]( forge::NetId id ) {
    if ( auto it = cc.find( id ); it != cc.end() )
      return it->second;
    std::pair<int64_t, int64_t> r{ cap, cap };
    if ( n.net_name( id ) == "1'b0" )
      r = { 1, cap };
    else if ( n.net_name( id ) == "1'b1" )
      r = { cap, 1 };
    else if ( !driver.count( id ) )
      r = { 1, 1 };
    else
    {
      auto const& g = n.gates[driver[id]];
      std::vector<std::pair<int64_t, int64_t>> in;
      for ( auto x : g.inputs )
        in.push_back( ctrl( x ) );
      int64_t all0 = 0, all1 = 0, any0 = cap, any1 = cap;
      for ( auto [c0, c1] : in )
      {
        all0 = sat( all0 + c0 );
        all1 = sat( all1 + c1 );
        any0 = std::min( any0, c0 );
        any1 = std::min( any1, c1 );
      }
      int64_t even = cap, odd = cap;
      if ( g.kind == forge::GateKind::xor_ || g.kind == forge::GateKind::xnor )
        for ( uint64_t m = 0; m < ( uint64_t{ 1 } << in.size() ); ++m )
        {
          int64_t cost = 0;
          for ( std::size_t k = 0; k < in.size(); ++k )
            cost = sat( cost + ( ( m >> k ) & 1u ? in[k].second : in[k].first ) );
          auto& slot = std::popcount( m ) % 2 ? odd : even;
          slot = std::min( slot, cost );
        }
      using forge::GateKind;
      switch ( g.kind )
      {
      case GateKind::buf: r = in[0]; break;
      case GateKind::not_: r = { in[0].second, in[0].first }; break;
      case GateKind::and_: r = { any0, all1 }; break;
      case GateKind::nand: r = { all1, any0 }; break;
      case GateKind::or_: r = { all0, any1 }; break;
      case GateKind::nor: r = { any1, all0 }; break;
      case GateKind::xor_: r = { even, odd }; break;
      case GateKind::xnor: r = { odd, even }; break;
      }
      r = { sat( r.first + 1 ), sat( r.second + 1 ) };
    }
    return cc[id] = r;
  };

  std::map<forge::NetId, int64_t> obs;
  std::function<int64_t( forge::NetId )> co = [&]( forge::NetId id ) -> int64_t {
    if ( auto it = obs.find( id ); it != obs.end() )
      return it->second;
    int64_t best = cap;
    if ( std::find( n.outputs.begin(), n.outputs.end(), id ) != n.outputs.end() )
      best = 0;
    for ( auto [gi, pos] : loads[id] )
    {
      auto const& g = n.gates[gi];
      int64_t v = co( g.output ) + 1;
      for ( std::size_t k = 0; k < g.inputs.size(); ++k )
      {
        if ( k == pos )
          continue;
        auto const [c0, c1] = ctrl( g.inputs[k] );
        using forge::GateKind;
        if ( g.kind == GateKind::and_ || g.kind == GateKind::nand )
          v += c1;
        else if ( g.kind == GateKind::or_ || g.kind == GateKind::nor )
          v += c0;
        else if ( g.kind == GateKind::xor_ || g.kind == GateKind::xnor )
          v += std::min( c0, c1 );
        v = sat( v );
      }
      best = std::min( best, sat( v ) );
    }
    return obs[id] = best;
  };

  Scoap s;
  for ( forge::NetId id = 0; id < n.num_nets(); ++id )
  {
    auto const [c0, c1] = ctrl( id );
    s.cc0[n.net_name( id )] = c0;
    s.cc1[n.net_name( id )] = c1;
    s.co[n.net_name( id )] = co( id );
  }
  return s;
}

} // namespace oracle
