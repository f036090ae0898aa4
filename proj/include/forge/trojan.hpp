#pragma once

/*!
  \file trojan.hpp
  \brief Combinational Trojan insertion (AND trigger, XOR payload) and certification

  A Trojan is a q-input AND over selected nets, each taken at its rarer
  polarity, whose output is XORed into a victim net.  Every inserted
  Trojan comes with a witness: a primary-input vector that fires the
  trigger and flips at least one primary output.
*/

#include "aig.hpp"
#include "analysis.hpp"
#include "detail/rng.hpp"
#include "equiv.hpp"
#include "justify.hpp"
#include "netlist.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace forge
{

struct TrojanSpec
{
  uint32_t q = 2;                 ///< trigger width
  std::optional<uint32_t> p;      ///< trigger inputs drawn from rare nets (default q)
  RareMetric metric = RareMetric::signal_prob_low;
  double threshold = 0.05;
  uint64_t vectors = 100000;      ///< samples for signal-probability metrics
  std::string payload = "xor-flip";
  uint64_t seed = 0;
  uint64_t witness_budget = 100000;
  uint32_t candidates = 16;       ///< trigger sets considered per insertion
  uint32_t victims_per_trigger = 4;
  uint64_t trigger_budget = 1000; ///< search effort spent proving a candidate trigger can fire
  uint32_t trigger_attempts = 8;  ///< such proofs per trigger net added

  /// Explicit trigger (net name, polarity); bypasses rare-net selection.
  std::vector<std::pair<std::string, bool>> trigger;
  /// Explicit victim net name.
  std::optional<std::string> victim;
};

struct TriggerNet
{
  std::string net;
  bool polarity = true;
  bool rare = false;

  friend bool operator==( TriggerNet const&, TriggerNet const& ) = default;
};

struct TrojanRecord
{
  std::vector<TriggerNet> trigger;
  std::string trigger_output;   ///< net carrying the trigger AND
  std::string victim;           ///< victim net name in the golden circuit
  std::string payload_gate;     ///< instance name of the XOR
  std::string payload_input;    ///< net carrying the victim's original value
  std::optional<Assignment> witness;
  std::vector<std::string> added_gates;
  std::vector<std::string> added_nets;
  uint64_t seed = 0;

  friend bool operator==( TrojanRecord const&, TrojanRecord const& ) = default;
};

class TrojanError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline nlohmann::json to_json( TrojanRecord const& r )
{
  auto trig = nlohmann::json::array();
  for ( auto const& t : r.trigger )
    trig.push_back( { { "net", t.net }, { "polarity", t.polarity ? 1 : 0 }, { "rare", t.rare } } );
  nlohmann::json j{ { "trigger", trig },
                    { "trigger_output", r.trigger_output },
                    { "victim", r.victim },
                    { "payload_gate", r.payload_gate },
                    { "payload_input", r.payload_input },
                    { "added_gates", r.added_gates },
                    { "added_nets", r.added_nets },
                    { "seed", r.seed } };
  if ( r.witness )
  {
    nlohmann::json w = nlohmann::json::object();
    for ( auto const& [k, v] : *r.witness )
      w[k] = v ? 1 : 0;
    j["witness"] = w;
  }
  else
    j["witness"] = nullptr;
  return j;
}

inline TrojanRecord trojan_record_from_json( nlohmann::json const& j )
{
  TrojanRecord r;
  for ( auto const& t : j.at( "trigger" ) )
    r.trigger.push_back( { t.at( "net" ).get<std::string>(), t.at( "polarity" ).get<int>() != 0,
                           t.value( "rare", false ) } );
  r.trigger_output = j.at( "trigger_output" ).get<std::string>();
  r.victim = j.at( "victim" ).get<std::string>();
  r.payload_gate = j.at( "payload_gate" ).get<std::string>();
  r.payload_input = j.at( "payload_input" ).get<std::string>();
  r.added_gates = j.at( "added_gates" ).get<std::vector<std::string>>();
  r.added_nets = j.at( "added_nets" ).get<std::vector<std::string>>();
  r.seed = j.value( "seed", uint64_t{ 0 } );
  if ( j.contains( "witness" ) && j["witness"].is_object() )
  {
    Assignment w;
    for ( auto const& [k, v] : j["witness"].items() )
      w[k] = v.get<int>() != 0;
    r.witness = std::move( w );
  }
  return r;
}

namespace detail
{

inline std::string fresh_net_name( Netlist const& n, std::string const& base )
{
  if ( !n.find_net( base ) )
    return base;
  for ( uint32_t k = 1;; ++k )
    if ( auto s = base + "_" + std::to_string( k ); !n.find_net( s ) )
      return s;
}

inline std::string fresh_instance_name( Netlist const& n, std::string const& base )
{
  auto taken = [&]( std::string const& s ) {
    return std::any_of( n.gates.begin(), n.gates.end(), [&]( Gate const& g ) { return g.name == s; } );
  };
  if ( !taken( base ) )
    return base;
  for ( uint32_t k = 1;; ++k )
    if ( auto s = base + "_" + std::to_string( k ); !taken( s ) )
      return s;
}

/// Nets from which some primary output is reachable (outputs included).
inline std::vector<uint8_t> reaches_output( Netlist const& n, Connectivity const& c )
{
  std::vector<uint8_t> r( n.num_nets(), 0 );
  for ( auto po : n.outputs )
    r[po] = 1;
  for ( auto it = c.order.rbegin(); it != c.order.rend(); ++it )
  {
    auto const& g = n.gates[*it];
    if ( r[g.output] )
      for ( auto in : g.inputs )
        r[in] = 1;
  }
  return r;
}

/* Builds the infected netlist: trigger AND (with inverters for
 * polarity 0) and an XOR between the victim's driver and its loads. */
inline std::pair<Netlist, TrojanRecord> build_trojan( Netlist const& golden, std::vector<TriggerNet> const& trigger,
                                                      NetId victim )
{
  Netlist m = golden;
  TrojanRecord rec;
  rec.trigger = trigger;
  rec.victim = golden.net_name( victim );
  auto const original_gates = m.gates.size();

  std::vector<NetId> ins;
  for ( std::size_t k = 0; k < trigger.size(); ++k )
  {
    auto const id = *m.find_net( trigger[k].net );
    if ( trigger[k].polarity )
    {
      ins.push_back( id );
      continue;
    }
    auto const net = fresh_net_name( m, "ht_n" + std::to_string( k ) );
    auto const inst = fresh_instance_name( m, "ht_inv" + std::to_string( k ) );
    ins.push_back( m.add_gate( GateKind::not_, { id }, net, inst ) );
    rec.added_nets.push_back( net );
    rec.added_gates.push_back( inst );
  }
  rec.trigger_output = fresh_net_name( m, "ht_trigger" );
  auto const trig_inst = fresh_instance_name( m, "ht_and" );
  auto const trig = m.add_gate( GateKind::and_, ins, rec.trigger_output, trig_inst );
  rec.added_nets.push_back( rec.trigger_output );
  rec.added_gates.push_back( trig_inst );

  bool const is_output = std::find( m.outputs.begin(), m.outputs.end(), victim ) != m.outputs.end();
  rec.payload_gate = fresh_instance_name( m, "ht_xor" );
  if ( is_output )
  {
    /* the output keeps its name: the original driver moves to a fresh net */
    rec.payload_input = fresh_net_name( m, "ht_pre" );
    m.rename_net( victim, rec.payload_input );
    auto const flipped = m.add_gate( GateKind::xor_, { victim, trig }, rec.victim, rec.payload_gate );
    for ( std::size_t g = 0; g < original_gates; ++g )
      for ( auto& in : m.gates[g].inputs )
        if ( in == victim )
          in = flipped;
    for ( auto& po : m.outputs )
      if ( po == victim )
        po = flipped;
    rec.added_nets.push_back( rec.victim );
  }
  else
  {
    rec.payload_input = rec.victim;
    auto const net = fresh_net_name( m, "ht_payload" );
    auto const flipped = m.add_gate( GateKind::xor_, { victim, trig }, net, rec.payload_gate );
    for ( std::size_t g = 0; g < original_gates; ++g )
      for ( auto& in : m.gates[g].inputs )
        if ( in == victim )
          in = flipped;
    rec.added_nets.push_back( net );
  }
  rec.added_gates.push_back( rec.payload_gate );
  require_valid( m );
  return { std::move( m ), std::move( rec ) };
}

} // namespace detail

/* --------------------------------------------------------------------
 * Witness search
 * ------------------------------------------------------------------ */

struct WitnessResult
{
  std::optional<Assignment> witness;
  std::string reason; ///< why no witness was returned
};

inline constexpr uint32_t free_fill_rounds = 64;

namespace detail
{

/// Backtracking search for an input setting `target` to 1.
inline SearchResult justify_net( Netlist const& n, NetId target, uint64_t budget, uint64_t seed )
{
  Netlist t = n;
  t.outputs = { target };
  auto const g = to_aig( t );
  SearchOptions opt;
  opt.budget = std::max<uint64_t>( budget, 1 );
  opt.seed = seed;
  return justify( g, g.pos(), opt );
}

inline Assignment to_assignment( Netlist const& n, std::vector<uint8_t> const& pi_values )
{
  Assignment w;
  for ( std::size_t k = 0; k < n.inputs.size(); ++k )
    w[n.net_name( n.inputs[k] )] = pi_values[k] != 0;
  return w;
}

inline bool outputs_differ( Netlist const& golden, Netlist const& infected, Assignment const& v )
{
  auto const a = simulate( golden, v );
  auto const b = simulate( infected, v );
  return std::any_of( golden.outputs.begin(), golden.outputs.end(), [&]( NetId po ) {
    auto const& name = golden.net_name( po );
    return a.at( name ) != b.at( name );
  } );
}

/// Whether some input fires an AND over `trig`.
inline SearchStatus trigger_satisfiable( Netlist const& n, std::vector<TriggerNet> const& trig, uint64_t budget,
                                         uint64_t seed )
{
  Netlist t = n;
  std::vector<NetId> ins;
  for ( auto const& x : trig )
  {
    auto id = *t.find_net( x.net );
    if ( !x.polarity )
      id = t.add_gate( GateKind::not_, { id }, fresh_net_name( t, "sat_n" ) );
    ins.push_back( id );
  }
  auto const out = t.add_gate( ins.size() == 1 ? GateKind::buf : GateKind::and_, ins, fresh_net_name( t, "sat_t" ) );
  return justify_net( t, out, budget, seed ).status;
}

} // namespace detail

/* Looks for an input that fires the trigger and makes some output of the
 * infected circuit differ from the golden one.  Exhaustive up to 24
 * primary inputs, otherwise a bounded backtracking search.  When the
 * trigger net is named, a quarter of the budget first goes to firing it
 * alone, which usually flips an output already. */
inline WitnessResult find_trigger_witness( Netlist const& golden, Netlist const& infected, uint64_t budget,
                                           uint64_t seed = 0, std::string const& trigger_output = {} )
{
  WitnessResult r;
  if ( golden.inputs.size() <= exact_prob_pi_bound )
  {
    EquivConfig cfg;
    cfg.exhaustive_bound = static_cast<uint32_t>( exact_prob_pi_bound );
    auto const v = check_equivalence( golden, infected, cfg );
    if ( v.refuted() )
      r.witness = v.counterexample;
    else
      r.reason = "exhausted exhaustive space";
    return r;
  }
  uint64_t used = 0;
  if ( auto const t = trigger_output.empty() ? std::nullopt : infected.find_net( trigger_output ) )
  {
    auto const s = detail::justify_net( infected, *t, budget / 4, seed );
    used = s.backtracks;
    if ( s.status == SearchStatus::unsatisfiable )
    {
      r.reason = "unsatisfiable";
      return r;
    }
    if ( s.status == SearchStatus::satisfiable )
    {
      /* inputs outside the trigger cone are free; a few random fillings
       * often unmask the flip */
      auto const c = connectivity( infected );
      auto const cone = transitive_fanin( infected, c, std::vector<NetId>{ *t } );
      Rng rng( derive_seed( seed, 3 ) );
      auto w = detail::to_assignment( golden, s.pi_values );
      for ( uint32_t round = 0; round <= free_fill_rounds; ++round )
      {
        if ( detail::outputs_differ( golden, infected, w ) )
        {
          r.witness = std::move( w );
          return r;
        }
        for ( auto pi : infected.inputs )
          if ( !cone[pi] )
            w[infected.net_name( pi )] = ( rng.next() & 1 ) != 0;
      }
    }
  }
  auto d = detail::difference_aig( golden, infected );
  AigBuilder b( d );
  AigEdge any = aig_false;
  for ( auto po : d.pos() )
    any = b.lor( any, po );
  std::vector<AigEdge> targets{ any };
  SearchOptions opt;
  opt.budget = std::max<uint64_t>( budget > used ? budget - used : 0, 1 );
  opt.seed = seed;
  auto const s = justify( d, targets, opt );
  if ( s.status == SearchStatus::satisfiable )
    r.witness = detail::to_assignment( golden, s.pi_values );
  else
    r.reason = s.status == SearchStatus::unsatisfiable ? "unsatisfiable" : "search budget exhausted";
  return r;
}

/// Same search driven by a record: the golden circuit is recovered by removing the Trojan.
inline Netlist strip_trojan( Netlist const& infected, TrojanRecord const& rec );

inline WitnessResult find_trigger_witness( Netlist const& infected, TrojanRecord const& rec, uint64_t budget )
{
  return find_trigger_witness( strip_trojan( infected, rec ), infected, budget, rec.seed, rec.trigger_output );
}

/// Whether `v` fires the trigger (every trigger net at its polarity) in `infected`.
inline bool trigger_fires( Netlist const& infected, TrojanRecord const& rec, Assignment const& v )
{
  auto const values = simulate( infected, v );
  if ( !values.at( rec.trigger_output ) )
    return false;
  return std::all_of( rec.trigger.begin(), rec.trigger.end(),
                      [&]( TriggerNet const& t ) { return values.at( t.net ) == t.polarity; } );
}

/// Fraction of random vectors that fire the trigger.
inline double activation_estimate( Netlist const& infected, TrojanRecord const& rec, uint64_t vectors, uint64_t seed )
{
  auto const st = signal_prob( infected, vectors, seed );
  return st.p[*infected.find_net( rec.trigger_output )];
}

/* --------------------------------------------------------------------
 * Insertion
 * ------------------------------------------------------------------ */

namespace detail
{

inline constexpr std::size_t joint_exhaustive_bound = 14;

/// Simulated values of every net over a fixed pattern set (all patterns for small PI counts).
struct PatternValues
{
  std::vector<uint64_t> values;
  std::size_t words = 0;
  uint64_t bits = 0;
  bool exhaustive = false;

  uint64_t const* row( NetId id ) const { return values.data() + id * words; }
};

inline PatternValues pattern_values( Netlist const& n, uint64_t seed )
{
  Simulator const sim( n );
  PatternValues pv;
  auto const npi = n.inputs.size();
  pv.exhaustive = npi <= joint_exhaustive_bound;
  pv.bits = pv.exhaustive ? uint64_t{ 1 } << npi : uint64_t{ 1 } << 17;
  pv.words = words_for( pv.bits );
  std::vector<uint64_t> pi( npi * pv.words );
  if ( pv.exhaustive )
    exhaustive_patterns( npi, 0, pv.words, pi );
  else
  {
    Rng rng( seed );
    random_patterns( rng, npi, pv.words, pi );
  }
  sim.run( pi, pv.words, pv.values );
  return pv;
}

inline void and_in( std::vector<uint64_t>& acc, PatternValues const& pv, NetId id, bool polarity )
{
  auto const* r = pv.row( id );
  for ( std::size_t w = 0; w < pv.words; ++w )
    acc[w] &= r[w] ^ ( polarity ? 0 : ~uint64_t{ 0 } );
}

/// Joint firing probability of each candidate trigger.
inline std::vector<double> joint_activation( Netlist const& n, PatternValues const& pv,
                                             std::vector<std::vector<TriggerNet>> const& sets )
{
  std::vector<double> out;
  std::vector<uint64_t> acc( pv.words );
  for ( auto const& s : sets )
  {
    std::fill( acc.begin(), acc.end(), ~uint64_t{ 0 } );
    for ( auto const& t : s )
      and_in( acc, pv, *n.find_net( t.net ), t.polarity );
    out.push_back( static_cast<double>( popcount( acc, pv.bits ) ) / static_cast<double>( pv.bits ) );
  }
  return out;
}

} // namespace detail

/* Inserts one Trojan.  Trigger candidates are drawn at random (p rare
 * nets plus q - p regular ones, each at its rarer value) and tried from
 * the least likely to fire upwards; the first one with an observable
 * witness is kept. */
inline std::pair<Netlist, TrojanRecord> insert_trojan( Netlist const& n, TrojanSpec const& spec )
{
  require_valid( n );
  if ( spec.payload != "xor-flip" )
    throw TrojanError( "unknown payload kind '" + spec.payload + "'" );
  if ( spec.q < 2 )
    throw TrojanError( "trigger width must be at least 2" );
  auto const p = spec.p.value_or( spec.q );
  if ( p > spec.q )
    throw TrojanError( "rare count exceeds trigger width" );

  auto const c = connectivity( n );
  auto const nets = candidate_nets( n );
  if ( nets.size() < spec.q + 1 )
    throw TrojanError( "trigger width exceeds the number of usable nets" );
  auto const observable = detail::reaches_output( n, c );
  Rng rng( spec.seed );

  auto victims_for = [&]( std::vector<TriggerNet> const& trig ) {
    std::vector<NetId> roots;
    for ( auto const& t : trig )
      roots.push_back( *n.find_net( t.net ) );
    auto const tfi = transitive_fanin( n, c, roots );
    std::vector<NetId> out;
    for ( auto id : nets )
      if ( !tfi[id] && observable[id] )
        out.push_back( id );
    return out;
  };

  auto try_build = [&]( std::vector<TriggerNet> const& trig, NetId victim ) -> std::optional<std::pair<Netlist, TrojanRecord>> {
    auto built = detail::build_trojan( n, trig, victim );
    auto const w =
        find_trigger_witness( n, built.first, spec.witness_budget, spec.seed, built.second.trigger_output );
    if ( !w.witness )
      return std::nullopt;
    built.second.witness = w.witness;
    built.second.seed = spec.seed;
    return built;
  };

  /* explicit trigger */
  if ( !spec.trigger.empty() )
  {
    std::vector<TriggerNet> trig;
    for ( auto const& [name, pol] : spec.trigger )
    {
      if ( !n.find_net( name ) )
        throw TrojanError( "unknown trigger net '" + name + "'" );
      trig.push_back( { name, pol, false } );
    }
    auto const allowed = victims_for( trig );
    NetId victim;
    if ( spec.victim )
    {
      auto const id = n.find_net( *spec.victim );
      if ( !id )
        throw TrojanError( "unknown victim net '" + *spec.victim + "'" );
      if ( std::find( allowed.begin(), allowed.end(), *id ) == allowed.end() )
      {
        std::vector<NetId> roots;
        for ( auto const& t : trig )
          roots.push_back( *n.find_net( t.net ) );
        if ( transitive_fanin( n, c, roots )[*id] )
          throw TrojanError( "combinational loop: victim lies in the trigger fanin" );
        throw TrojanError( "victim has no primary output in its fanout" );
      }
      victim = *id;
    }
    else
    {
      if ( allowed.empty() )
        throw TrojanError( "no loop-free victim available" );
      victim = rng.pick( allowed );
    }
    if ( auto r = try_build( trig, victim ) )
      return std::move( *r );
    throw TrojanError( "no witness found for the requested trigger" );
  }

  /* rare-net driven selection */
  RareSplit split;
  std::function<bool( NetId )> rarer;
  ScoapValues sc;
  NetStats st;
  if ( spec.metric == RareMetric::scoap_hard )
  {
    sc = scoap( n );
    split = rare_nets( n, sc, spec.metric, spec.threshold );
    rarer = [&]( NetId id ) { return rarer_value( sc, id ); };
  }
  else
  {
    st = signal_prob( n, spec.vectors, derive_seed( spec.seed, 1 ) );
    split = rare_nets( n, st, spec.metric, spec.threshold );
    rarer = [&]( NetId id ) { return rarer_value( st, id ); };
    /* a net never seen at its rare value cannot take part in a trigger */
    auto stuck = [&]( NetId id ) { return st.p[id] == 0.0 || st.p[id] == 1.0; };
    std::erase_if( split.rare, stuck );
    std::erase_if( split.regular, stuck );
  }
  if ( split.rare.size() < p )
    throw TrojanError( "insufficient rare nets: need " + std::to_string( p ) + ", found " +
                       std::to_string( split.rare.size() ) );
  if ( split.regular.size() < spec.q - p )
    throw TrojanError( "insufficient regular nets for the requested trigger" );

  /* each candidate is grown one net at a time; with all patterns at hand
   * nets that would make it unfireable are skipped, otherwise the
   * backtracking search below rejects dead sets */
  auto const pv = detail::pattern_values( n, derive_seed( spec.seed, 2 ) );
  auto attempt = [&]( std::vector<TriggerNet> const& trig ) -> std::optional<std::pair<Netlist, TrojanRecord>> {
    auto allowed = victims_for( trig );
    rng.shuffle( allowed );
    if ( allowed.size() > spec.victims_per_trigger )
      allowed.resize( spec.victims_per_trigger );
    for ( auto v : allowed )
      if ( auto r = try_build( trig, v ) )
        return r;
    return std::nullopt;
  };

  std::vector<std::vector<TriggerNet>> sets;
  std::vector<uint64_t> acc( pv.words ), next( pv.words );
  for ( uint32_t k = 0; k < spec.candidates; ++k )
  {
    auto rare = split.rare, regular = split.regular;
    rng.shuffle( rare );
    rng.shuffle( regular );
    std::fill( acc.begin(), acc.end(), ~uint64_t{ 0 } );
    std::vector<TriggerNet> trig;
    /* Best first: the net leaving the fewest patterns that fire the set.
     * Once no pattern fires it, additions must be proven satisfiable by
     * search (up to trigger_attempts tries per step). */
    auto grow = [&]( std::vector<NetId> const& pool, uint32_t want, bool is_rare ) {
      for ( uint32_t got = 0; got < want; ++got )
      {
        std::vector<std::pair<std::size_t, NetId>> ranked;
        for ( auto id : pool )
        {
          auto const name = n.net_name( id );
          if ( std::any_of( trig.begin(), trig.end(), [&]( auto const& t ) { return t.net == name; } ) )
            continue;
          next = acc;
          detail::and_in( next, pv, id, rarer( id ) );
          ranked.emplace_back( detail::popcount( next, pv.bits ), id );
        }
        /* the first pick stays random so candidates differ */
        if ( trig.empty() && !ranked.empty() )
          std::rotate( ranked.begin(), ranked.begin() + rng.below( ranked.size() ), ranked.end() );
        else
          std::stable_sort( ranked.begin(), ranked.end(), []( auto const& x, auto const& y ) { return x.first < y.first; } );
        uint32_t attempts = 0;
        bool placed = false;
        for ( auto const& [hits, id] : ranked )
        {
          trig.push_back( { n.net_name( id ), rarer( id ), is_rare } );
          if ( hits == 0 )
          {
            bool ok = !pv.exhaustive && attempts < spec.trigger_attempts;
            if ( ok )
            {
              ++attempts;
              ok = detail::trigger_satisfiable( n, trig, spec.trigger_budget, spec.seed ) == SearchStatus::satisfiable;
            }
            if ( !ok )
            {
              trig.pop_back();
              continue;
            }
          }
          detail::and_in( acc, pv, id, rarer( id ) );
          placed = true;
          break;
        }
        if ( !placed )
          return false;
      }
      return true;
    };
    if ( !grow( rare, p, true ) || !grow( regular, spec.q - p, false ) )
      continue;
    /* no sampled pattern fires it and search says it can fire: as rare as it gets */
    if ( !pv.exhaustive && detail::popcount( acc, pv.bits ) == 0 )
    {
      if ( auto r = attempt( trig ) )
        return std::move( *r );
      continue;
    }
    sets.push_back( std::move( trig ) );
  }
  auto const prob = detail::joint_activation( n, pv, sets );
  std::vector<std::size_t> order( sets.size() );
  for ( std::size_t k = 0; k < order.size(); ++k )
    order[k] = k;
  std::stable_sort( order.begin(), order.end(), [&]( auto a, auto b ) { return prob[a] < prob[b]; } );
  for ( auto k : order )
    if ( auto r = attempt( sets[k] ) )
      return std::move( *r );
  throw TrojanError( "no activatable trigger found among " + std::to_string( spec.candidates ) + " candidates" );
}

/* --------------------------------------------------------------------
 * Certification
 * ------------------------------------------------------------------ */

inline Netlist strip_trojan( Netlist const& infected, TrojanRecord const& rec )
{
  Netlist out( infected.name );
  auto is_added_gate = [&]( Gate const& g ) {
    return std::find( rec.added_gates.begin(), rec.added_gates.end(), g.name ) != rec.added_gates.end();
  };
  auto const payload = std::find_if( infected.gates.begin(), infected.gates.end(),
                                     [&]( Gate const& g ) { return g.name == rec.payload_gate; } );
  if ( payload == infected.gates.end() )
    throw TrojanError( "payload gate '" + rec.payload_gate + "' not found" );
  auto const flipped = payload->output;
  auto const pre = *infected.find_net( rec.payload_input );

  /* nets keep their names except that the payload output folds back into the victim */
  auto name_of = [&]( NetId id ) -> std::string {
    if ( id == flipped || id == pre )
      return rec.victim;
    return infected.net_name( id );
  };
  for ( auto pi : infected.inputs )
    out.add_input( name_of( pi ) );
  for ( auto const& g : infected.gates )
  {
    if ( is_added_gate( g ) )
      continue;
    std::vector<NetId> ins;
    for ( auto in : g.inputs )
      ins.push_back( out.net( name_of( in ) ) );
    out.add_gate( g.kind, ins, name_of( g.output ), g.name );
  }
  for ( auto po : infected.outputs )
    out.add_output( name_of( po ) );
  return out;
}

struct TrojanVerdict
{
  bool pass = false;
  std::string reason;
  std::optional<Assignment> vector; ///< offending input on failure
};

/* (i) golden and infected agree wherever the trigger is 0, (ii) they
 * disagree on the stored witness, and the trigger is not stuck at 1. */
inline TrojanVerdict check_trojan_semantics( Netlist const& golden, Netlist const& infected, TrojanRecord const& rec,
                                             EquivConfig const& cfg = {} )
{
  TrojanVerdict v;
  require_same_interface( golden, infected );
  auto const trig_id = infected.find_net( rec.trigger_output );
  if ( !trig_id )
  {
    v.reason = "trigger net missing";
    return v;
  }
  Simulator const sg( golden ), si( infected );
  auto const npi = golden.inputs.size();
  bool const exhaustive = npi <= cfg.exhaustive_bound;
  uint64_t const total = exhaustive ? uint64_t{ 1 } << npi : cfg.vectors;
  uint64_t const chunk_bits = 64 * 256;
  Rng rng( cfg.seed );
  std::vector<uint64_t> pi, vg, vi;
  uint64_t idle = 0;
  for ( uint64_t done = 0; done < total; done += chunk_bits )
  {
    auto const bits = std::min( chunk_bits, total - done );
    auto const words = detail::words_for( bits );
    pi.resize( npi * words );
    if ( exhaustive )
      detail::exhaustive_patterns( npi, done / 64, words, pi );
    else
      detail::random_patterns( rng, npi, words, pi );
    sg.run( pi, words, vg );
    si.run( pi, words, vi );
    for ( std::size_t w = 0; w < words; ++w )
    {
      auto const mask = w + 1 == words ? detail::tail_mask( bits ) : ~uint64_t{ 0 };
      auto const quiet = ~vi[*trig_id * words + w] & mask;
      idle += static_cast<uint64_t>( std::popcount( quiet ) );
      uint64_t diff = 0;
      for ( std::size_t k = 0; k < golden.outputs.size(); ++k )
        diff |= vg[golden.outputs[k] * words + w] ^ vi[infected.outputs[k] * words + w];
      if ( diff & quiet )
      {
        v.reason = "outputs differ while the trigger is inactive";
        v.vector = pattern_assignment( golden, pi, words, w * 64 + std::countr_zero( diff & quiet ) );
        return v;
      }
    }
  }
  if ( idle == 0 )
  {
    v.reason = "trigger active on every tested input";
    return v;
  }
  if ( !rec.witness )
  {
    v.reason = "unproven HT";
    return v;
  }
  auto const ri = simulate( infected, *rec.witness ), rg = simulate( golden, *rec.witness );
  if ( !ri.at( rec.trigger_output ) )
  {
    v.reason = "witness does not fire the trigger";
    v.vector = rec.witness;
    return v;
  }
  bool differs = false;
  for ( std::size_t k = 0; k < golden.outputs.size(); ++k )
    differs |= rg.at( golden.net_name( golden.outputs[k] ) ) != ri.at( infected.net_name( infected.outputs[k] ) );
  if ( !differs )
  {
    v.reason = "witness shows no output difference";
    v.vector = rec.witness;
    return v;
  }
  v.pass = true;
  return v;
}

} // namespace forge
