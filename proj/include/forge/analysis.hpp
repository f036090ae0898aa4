#pragma once

/*!
  \file analysis.hpp
  \brief SCOAP testability, signal/transition probabilities, rare nets
*/

#include "detail/bits.hpp"
#include "detail/rng.hpp"
#include "netlist.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge
{

/* --------------------------------------------------------------------
 * SCOAP
 * ------------------------------------------------------------------ */

/// Values saturate here; unreachable values (e.g. CC1 of constant 0) sit at the cap too.
inline constexpr int64_t scoap_cap = ( int64_t{ 1 } << 31 ) - 1;

struct ScoapValues
{
  std::vector<int64_t> cc0, cc1, co; ///< indexed by net id
  bool saturated = false; ///< some finite value overflowed the cap
};

namespace detail
{

struct SatAdd
{
  bool& flag;
  int64_t operator()( int64_t a, int64_t b ) const
  {
    if ( a >= scoap_cap || b >= scoap_cap )
      return scoap_cap; // unreachable stays unreachable
    auto const s = a + b;
    if ( s >= scoap_cap )
    {
      flag = true;
      return scoap_cap;
    }
    return s;
  }
};

} // namespace detail

inline ScoapValues scoap( Netlist const& n )
{
  auto const c = connectivity( n );
  if ( !c.acyclic )
    throw NetlistError( validate( n ) );
  auto const nn = n.num_nets();
  ScoapValues s;
  s.cc0.assign( nn, scoap_cap );
  s.cc1.assign( nn, scoap_cap );
  s.co.assign( nn, scoap_cap );
  detail::SatAdd add{ s.saturated };

  for ( NetId id = 0; id < nn; ++id )
    if ( auto v = n.constant_value( id ) )
      ( *v ? s.cc1 : s.cc0 )[id] = 1;
  for ( auto pi : n.inputs )
    s.cc0[pi] = s.cc1[pi] = 1;

  for ( auto gi : c.order )
  {
    auto const& g = n.gates[gi];
    int64_t sum0 = 0, sum1 = 0, min0 = scoap_cap, min1 = scoap_cap;
    int64_t par0 = 0, par1 = scoap_cap; ///< cheapest way to reach even/odd parity
    for ( auto in : g.inputs )
    {
      sum0 = add( sum0, s.cc0[in] );
      sum1 = add( sum1, s.cc1[in] );
      min0 = std::min( min0, s.cc0[in] );
      min1 = std::min( min1, s.cc1[in] );
      auto const e = std::min( add( par0, s.cc0[in] ), add( par1, s.cc1[in] ) );
      auto const o = std::min( add( par0, s.cc1[in] ), add( par1, s.cc0[in] ) );
      par0 = e;
      par1 = o;
    }
    int64_t z = 0, o = 0;
    switch ( g.kind )
    {
    case GateKind::buf:
      z = s.cc0[g.inputs[0]];
      o = s.cc1[g.inputs[0]];
      break;
    case GateKind::not_:
      z = s.cc1[g.inputs[0]];
      o = s.cc0[g.inputs[0]];
      break;
    case GateKind::and_:
      z = min0;
      o = sum1;
      break;
    case GateKind::nand:
      z = sum1;
      o = min0;
      break;
    case GateKind::or_:
      z = sum0;
      o = min1;
      break;
    case GateKind::nor:
      z = min1;
      o = sum0;
      break;
    case GateKind::xor_:
      z = par0;
      o = par1;
      break;
    case GateKind::xnor:
      z = par1;
      o = par0;
      break;
    }
    s.cc0[g.output] = add( z, 1 );
    s.cc1[g.output] = add( o, 1 );
  }

  for ( auto po : n.outputs )
    s.co[po] = 0;
  for ( auto it = c.order.rbegin(); it != c.order.rend(); ++it )
  {
    auto const& g = n.gates[*it];
    auto const co_out = s.co[g.output];
    for ( std::size_t k = 0; k < g.inputs.size(); ++k )
    {
      int64_t side = 0;
      for ( std::size_t j = 0; j < g.inputs.size(); ++j )
      {
        if ( j == k )
          continue;
        auto const in = g.inputs[j];
        switch ( g.kind )
        {
        case GateKind::and_:
        case GateKind::nand:
          side = add( side, s.cc1[in] );
          break;
        case GateKind::or_:
        case GateKind::nor:
          side = add( side, s.cc0[in] );
          break;
        case GateKind::xor_:
        case GateKind::xnor:
          side = add( side, std::min( s.cc0[in], s.cc1[in] ) );
          break;
        default:
          break;
        }
      }
      auto const via = add( add( co_out, side ), 1 );
      auto& dst = s.co[g.inputs[k]];
      dst = std::min( dst, via );
    }
  }
  return s;
}

/* --------------------------------------------------------------------
 * Signal probability
 * ------------------------------------------------------------------ */

struct NetStats
{
  std::vector<double> p; ///< probability of 1 per net id
  uint64_t samples = 0;
  bool exact = false;

  double transition( NetId id ) const { return 2.0 * p[id] * ( 1.0 - p[id] ); }
};

namespace detail
{

inline void accumulate_ones( Netlist const& n, Simulator const& sim, std::span<uint64_t const> pi, std::size_t words,
                             uint64_t valid_bits, std::vector<uint64_t>& values, std::vector<uint64_t>& ones )
{
  sim.run( pi, words, values );
  for ( NetId id = 0; id < n.num_nets(); ++id )
  {
    auto const row = std::span<uint64_t const>( values ).subspan( std::size_t{ id } * words, words );
    ones[id] += popcount( row, valid_bits );
  }
}

} // namespace detail

/// Fraction of `vectors` uniform random PI vectors setting each net to 1.
inline NetStats signal_prob( Netlist const& n, uint64_t vectors, uint64_t seed )
{
  if ( vectors == 0 )
    throw std::invalid_argument( "signal probability needs at least one vector" );
  Simulator const sim( n );
  Rng rng( seed );
  std::vector<uint64_t> ones( n.num_nets(), 0 ), values, pi;
  uint64_t remaining = vectors;
  while ( remaining > 0 )
  {
    auto const bits = std::min<uint64_t>( remaining, 64 * 256 );
    auto const words = detail::words_for( bits );
    pi.resize( n.inputs.size() * words );
    detail::random_patterns( rng, n.inputs.size(), words, pi );
    detail::accumulate_ones( n, sim, pi, words, bits, values, ones );
    remaining -= bits;
  }
  NetStats st;
  st.samples = vectors;
  st.p.resize( n.num_nets() );
  for ( NetId id = 0; id < n.num_nets(); ++id )
    st.p[id] = static_cast<double>( ones[id] ) / static_cast<double>( vectors );
  return st;
}

inline constexpr std::size_t exact_prob_pi_bound = 24;

/// Exact probabilities over all 2^PI input vectors.
inline NetStats exact_signal_prob( Netlist const& n )
{
  auto const npi = n.inputs.size();
  if ( npi > exact_prob_pi_bound )
    throw std::invalid_argument( "exact signal probability supports at most 24 primary inputs" );
  Simulator const sim( n );
  uint64_t const total_bits = uint64_t{ 1 } << npi;
  uint64_t const total_words = detail::words_for( total_bits );
  uint64_t const chunk = std::min<uint64_t>( total_words, 1024 );
  std::vector<uint64_t> ones( n.num_nets(), 0 ), values, pi;
  for ( uint64_t first = 0; first < total_words; first += chunk )
  {
    auto const words = std::min( chunk, total_words - first );
    pi.resize( npi * words );
    detail::exhaustive_patterns( npi, first, words, pi );
    detail::accumulate_ones( n, sim, pi, words, std::min<uint64_t>( words * 64, total_bits - first * 64 ), values,
                             ones );
  }
  NetStats st;
  st.samples = total_bits;
  st.exact = true;
  st.p.resize( n.num_nets() );
  for ( NetId id = 0; id < n.num_nets(); ++id )
    st.p[id] = static_cast<double>( ones[id] ) / static_cast<double>( total_bits );
  return st;
}

/* --------------------------------------------------------------------
 * Rare nets
 * ------------------------------------------------------------------ */

enum class RareMetric
{
  signal_prob_low,
  signal_prob_high,
  scoap_hard
};

inline std::string to_string( RareMetric m )
{
  switch ( m )
  {
  case RareMetric::signal_prob_low:
    return "signal-prob-low";
  case RareMetric::signal_prob_high:
    return "signal-prob-high";
  case RareMetric::scoap_hard:
    return "scoap-hard";
  }
  return {};
}

inline RareMetric rare_metric_from_string( std::string const& s )
{
  if ( s == "signal-prob-low" )
    return RareMetric::signal_prob_low;
  if ( s == "signal-prob-high" )
    return RareMetric::signal_prob_high;
  if ( s == "scoap-hard" )
    return RareMetric::scoap_hard;
  throw std::invalid_argument( "unknown rare-net metric '" + s + "'" );
}

/// The (rare, regular) partition of the candidate nets; `rare` is rarest-first.
struct RareSplit
{
  std::vector<NetId> rare;
  std::vector<NetId> regular;
};

/// Driven, non-constant nets: primary inputs and gate outputs.
inline std::vector<NetId> candidate_nets( Netlist const& n )
{
  auto const c = connectivity( n );
  std::vector<NetId> out;
  for ( NetId id = 0; id < n.num_nets(); ++id )
    if ( c.driver[id] == driver_input || c.driver[id] >= 0 )
      out.push_back( id );
  return out;
}

inline int64_t scoap_score( ScoapValues const& s, NetId id )
{
  return std::min( scoap_cap, s.cc0[id] + s.cc1[id] + s.co[id] );
}

namespace detail
{

template<typename Key>
RareSplit split_nets( std::vector<NetId> const& nets, Key key, bool ascending, std::function<bool( NetId )> rare )
{
  RareSplit r;
  for ( auto id : nets )
    ( rare( id ) ? r.rare : r.regular ).push_back( id );
  std::stable_sort( r.rare.begin(), r.rare.end(), [&]( NetId a, NetId b ) {
    auto const ka = key( a ), kb = key( b );
    if ( ka != kb )
      return ascending ? ka < kb : ka > kb;
    return a < b;
  } );
  return r;
}

} // namespace detail

/* signal-prob-low: p <= theta; signal-prob-high: p >= 1 - theta; a zero
 * threshold selects nothing. */
inline RareSplit rare_nets( Netlist const& n, NetStats const& st, RareMetric metric, double threshold )
{
  auto const nets = candidate_nets( n );
  if ( metric == RareMetric::scoap_hard )
    throw std::invalid_argument( "scoap-hard needs SCOAP values" );
  bool const low = metric == RareMetric::signal_prob_low;
  return detail::split_nets(
      nets, [&]( NetId id ) { return st.p[id]; }, low,
      [&]( NetId id ) { return threshold > 0 && ( low ? st.p[id] <= threshold : st.p[id] >= 1.0 - threshold ); } );
}

/// scoap-hard: CC0 + CC1 + CO >= threshold, hardest first.
inline RareSplit rare_nets( Netlist const& n, ScoapValues const& s, RareMetric metric, double threshold )
{
  if ( metric != RareMetric::scoap_hard )
    throw std::invalid_argument( "signal-probability metrics need signal statistics" );
  auto const nets = candidate_nets( n );
  return detail::split_nets(
      nets, [&]( NetId id ) { return scoap_score( s, id ); }, false,
      [&]( NetId id ) { return threshold > 0 && static_cast<double>( scoap_score( s, id ) ) >= threshold; } );
}

/// The value a net takes less often (ties favour 1).
inline bool rarer_value( NetStats const& st, NetId id ) { return st.p[id] <= 0.5; }

/// The value that is harder to control (ties favour 1).
inline bool rarer_value( ScoapValues const& s, NetId id ) { return s.cc1[id] >= s.cc0[id]; }

/// One record per candidate net: {net, cc0, cc1, co, p, tp}; missing analyses are omitted.
inline nlohmann::json analysis_to_json( Netlist const& n, ScoapValues const* s, NetStats const* st )
{
  auto arr = nlohmann::json::array();
  for ( auto id : candidate_nets( n ) )
  {
    nlohmann::json j{ { "net", n.net_name( id ) } };
    if ( s )
    {
      j["cc0"] = s->cc0[id];
      j["cc1"] = s->cc1[id];
      j["co"] = s->co[id];
    }
    if ( st )
    {
      j["p"] = st->p[id];
      j["tp"] = st->transition( id );
    }
    arr.push_back( std::move( j ) );
  }
  return arr;
}

} // namespace forge
