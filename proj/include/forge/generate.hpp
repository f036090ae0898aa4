#pragma once

/*!
  \file generate.hpp
  \brief Seeded random combinational netlists and a few classic circuits
*/

#include "detail/rng.hpp"
#include "netlist.hpp"

#include <array>
#include <string>

namespace forge
{

struct RandomNetlistOptions
{
  uint32_t num_inputs = 8;
  uint32_t num_gates = 40;
  uint32_t num_outputs = 4;
  uint32_t max_fanin = 3;
  /// Relative weight per gate kind, indexed like all_gate_kinds.
  std::array<double, 8> kind_weights{ 0.5, 1.0, 2.0, 2.0, 1.0, 1.5, 1.5, 0.5 };
  /// Probability that a fanin is drawn from the most recent 8 nets (adds depth).
  double locality = 0.5;
  /// Prepended to every port name (i0.., o0..).
  std::string port_prefix;
};

inline Netlist random_netlist( RandomNetlistOptions const& opt, uint64_t seed )
{
  Rng rng( seed );
  Netlist n( "rand" + std::to_string( seed ) );
  std::vector<NetId> pool;
  for ( uint32_t i = 0; i < opt.num_inputs; ++i )
    pool.push_back( n.add_input( opt.port_prefix + "i" + std::to_string( i ) ) );

  double total = 0;
  for ( auto w : opt.kind_weights )
    total += w;

  std::vector<uint32_t> uses( opt.num_inputs + opt.num_gates + 2, 0 );
  for ( uint32_t g = 0; g < opt.num_gates; ++g )
  {
    double r = rng.uniform() * total;
    std::size_t k = 0;
    while ( k + 1 < 8 && r >= opt.kind_weights[k] )
      r -= opt.kind_weights[k++];
    auto const kind = all_gate_kinds[k];

    std::size_t arity = 1;
    if ( !is_unary( kind ) )
      arity = 2 + ( opt.max_fanin > 2 ? rng.below( opt.max_fanin - 1 ) : 0 );
    arity = std::min<std::size_t>( arity, pool.size() );
    if ( !is_unary( kind ) && arity < 2 )
      arity = 2;

    std::vector<NetId> fanins;
    while ( fanins.size() < arity )
    {
      NetId pick;
      if ( rng.bernoulli( opt.locality ) )
      {
        auto const window = std::min<std::size_t>( 8, pool.size() );
        pick = pool[pool.size() - 1 - rng.below( window )];
      }
      else
        pick = rng.pick( pool );
      if ( std::find( fanins.begin(), fanins.end(), pick ) == fanins.end() || pool.size() < arity )
        fanins.push_back( pick );
    }
    for ( auto f : fanins )
      ++uses[f];
    pool.push_back( n.add_gate( kind, std::move( fanins ), "w" + std::to_string( g ) ) );
  }

  /* sinks become outputs first, then the most recent nets */
  std::vector<NetId> outs;
  for ( auto it = pool.rbegin(); it != pool.rend() && outs.size() < opt.num_outputs; ++it )
    if ( *it >= opt.num_inputs && uses[*it] == 0 )
      outs.push_back( *it );
  for ( auto it = pool.rbegin(); it != pool.rend() && outs.size() < opt.num_outputs; ++it )
    if ( *it >= opt.num_inputs && std::find( outs.begin(), outs.end(), *it ) == outs.end() )
      outs.push_back( *it );
  std::sort( outs.begin(), outs.end() );
  for ( std::size_t k = 0; k < outs.size(); ++k )
  {
    n.rename_net( outs[k], opt.port_prefix + "o" + std::to_string( k ) );
    n.outputs.push_back( outs[k] );
  }
  return n;
}

/// The ISCAS-85 c17 circuit (six 2-input NANDs).
inline Netlist c17()
{
  return parse_netlist( R"(module c17 (N1,N2,N3,N6,N7,N22,N23);
input N1,N2,N3,N6,N7;
output N22,N23;
wire N10,N11,N16,N19;
nand NAND2_1 (N10, N1, N3);
nand NAND2_2 (N11, N3, N6);
nand NAND2_3 (N16, N2, N11);
nand NAND2_4 (N19, N11, N7);
nand NAND2_5 (N22, N10, N16);
nand NAND2_6 (N23, N16, N19);
endmodule
)" );
}

/// One-bit full adder: 2 XOR, 2 AND, 1 OR.
inline Netlist full_adder()
{
  return parse_netlist( R"(module full_adder(a, b, cin, sum, cout);
  input a, b, cin;
  output sum, cout;
  wire t, u, v;
  xor x1(t, a, b);
  xor x2(sum, t, cin);
  and a1(u, a, b);
  and a2(v, t, cin);
  or o1(cout, u, v);
endmodule
)" );
}

} // namespace forge
