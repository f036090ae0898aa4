#pragma once

/*!
  \file bench.hpp
  \brief Blind benchmark sets (clean and infected variants) and judging
*/

#include "detail/rng.hpp"
#include "detail/sha256.hpp"
#include "equiv.hpp"
#include "netlist.hpp"
#include "recipe.hpp"
#include "trojan.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace forge
{

inline constexpr int bench_format_version = 1;
inline constexpr char const* forge_version = "1.0.0";

class BenchError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/* --------------------------------------------------------------------
 * Calendar helpers (ISO dates)
 * ------------------------------------------------------------------ */

using Date = std::chrono::year_month_day;

inline Date parse_date( std::string const& s )
{
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if ( std::sscanf( s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail ) != 3 )
    throw BenchError( "bad date '" + s + "' (expected YYYY-MM-DD)" );
  Date const date{ std::chrono::year( y ), std::chrono::month( m ), std::chrono::day( d ) };
  if ( !date.ok() )
    throw BenchError( "bad date '" + s + "'" );
  return date;
}

inline std::string format_date( Date const& d )
{
  char buf[16];
  std::snprintf( buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>( d.year() ), static_cast<unsigned>( d.month() ),
                 static_cast<unsigned>( d.day() ) );
  return buf;
}

/// Adds whole years; Feb 29 falls back to Feb 28.
inline Date add_years( Date const& d, int years )
{
  Date r = d + std::chrono::years( years );
  if ( !r.ok() )
    r = r.year() / r.month() / std::chrono::last;
  return r;
}

inline Date first_of_next_month( Date const& d )
{
  auto const ym = d.year() / d.month() + std::chrono::months( 1 );
  return ym / std::chrono::day( 1 );
}

/* --------------------------------------------------------------------
 * Configuration
 * ------------------------------------------------------------------ */

struct GoldenCircuit
{
  std::string name;
  Netlist netlist;
};

struct TrojanDistribution
{
  std::vector<uint32_t> q_values{ 2, 3, 4 }; ///< drawn uniformly per infected variant
  std::optional<uint32_t> p;                ///< rare inputs per trigger (default: all)
  RareMetric metric = RareMetric::signal_prob_low;
  double threshold = 0.05;
  uint64_t vectors = 100000;
  uint64_t witness_budget = 100000;
};

struct ForgeConfig
{
  std::string set_name = "seeker";
  std::vector<GoldenCircuit> golden;
  uint32_t variants = 1;                ///< per golden circuit
  double infection_rate = 0.5;          ///< Bernoulli rate per variant
  std::vector<uint32_t> infected_counts; ///< exact infected variants per golden; overrides the rate
  std::vector<Recipe> recipes;          ///< empty: all built-in recipes
  TrojanDistribution trojan;
  uint64_t seed = 0;
  std::string release_date = "2026-01-01";
  uint32_t max_regenerations = 8;
  EquivConfig check;
};

inline nlohmann::json to_json( TrojanDistribution const& t )
{
  nlohmann::json j{ { "q", t.q_values },
                    { "metric", to_string( t.metric ) },
                    { "threshold", t.threshold },
                    { "vectors", t.vectors },
                    { "witness_budget", t.witness_budget } };
  j["p"] = t.p ? nlohmann::json( *t.p ) : nlohmann::json();
  return j;
}

/// Canonical form used for the config hash; golden circuits enter by content hash.
inline nlohmann::json config_to_json( ForgeConfig const& c )
{
  nlohmann::json golden = nlohmann::json::array();
  for ( auto const& g : c.golden )
    golden.push_back( { { "name", g.name }, { "sha256", detail::sha256_hex( write_netlist( g.netlist ) ) } } );
  nlohmann::json recipes = nlohmann::json::array();
  for ( auto const& r : c.recipes )
    recipes.push_back( r.id ? nlohmann::json( r.id ) : recipe_to_json( r ) );
  return { { "set_name", c.set_name },
           { "golden", golden },
           { "variants", c.variants },
           { "infection_rate", c.infection_rate },
           { "infected_counts", c.infected_counts },
           { "recipes", recipes },
           { "trojan", to_json( c.trojan ) },
           { "seed", c.seed },
           { "release_date", c.release_date },
           { "max_regenerations", c.max_regenerations },
           { "exhaustive_bound", c.check.exhaustive_bound },
           { "vectors", c.check.vectors } };
}

/* Reads a config object.  Golden entries are paths or {"name", "path"}
 * objects resolved through `load`; recipes are built-in ids or lists of
 * passes. */
inline ForgeConfig forge_config_from_json( nlohmann::json const& j,
                                           std::function<Netlist( std::string const& )> const& load )
{
  if ( !j.is_object() )
    throw BenchError( "config must be a JSON object" );
  ForgeConfig c;
  try
  {
    c.set_name = j.value( "set_name", c.set_name );
    c.variants = j.value( "variants", c.variants );
    c.infection_rate = j.value( "infection_rate", c.infection_rate );
    if ( j.contains( "infected_counts" ) )
      c.infected_counts = j["infected_counts"].get<std::vector<uint32_t>>();
    c.seed = j.value( "seed", c.seed );
    c.release_date = j.value( "release_date", c.release_date );
    c.max_regenerations = j.value( "max_regenerations", c.max_regenerations );
    c.check.exhaustive_bound = j.value( "exhaustive_bound", c.check.exhaustive_bound );
    c.check.vectors = j.value( "vectors", c.check.vectors );
    if ( !j.contains( "golden" ) || !j["golden"].is_array() )
      throw BenchError( "config needs a \"golden\" list" );
    for ( auto const& g : j["golden"] )
    {
      std::string path, name;
      if ( g.is_string() )
        path = g.get<std::string>();
      else
      {
        path = g.at( "path" ).get<std::string>();
        name = g.value( "name", std::string() );
      }
      if ( name.empty() )
        name = std::filesystem::path( path ).stem().string();
      c.golden.push_back( { name, load( path ) } );
    }
    if ( j.contains( "recipes" ) )
      for ( auto const& r : j["recipes"] )
      {
        if ( r.is_number_integer() )
        {
          auto const id = r.get<int>();
          if ( id < 1 || id > num_builtin_recipes )
            throw BenchError( "unknown built-in recipe " + std::to_string( id ) );
          c.recipes.push_back( builtin_recipe( id ) );
        }
        else
          c.recipes.push_back( recipe_from_json( r ) );
      }
    if ( j.contains( "trojan" ) )
    {
      auto const& t = j["trojan"];
      auto& d = c.trojan;
      if ( t.contains( "q" ) )
        d.q_values = t["q"].is_array() ? t["q"].get<std::vector<uint32_t>>()
                                       : std::vector<uint32_t>{ t["q"].get<uint32_t>() };
      if ( t.contains( "p" ) && !t["p"].is_null() )
        d.p = t["p"].get<uint32_t>();
      if ( t.contains( "metric" ) )
        d.metric = rare_metric_from_string( t["metric"].get<std::string>() );
      d.threshold = t.value( "threshold", d.threshold );
      d.vectors = t.value( "vectors", d.vectors );
      d.witness_budget = t.value( "witness_budget", d.witness_budget );
    }
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw BenchError( std::string( "bad config: " ) + e.what() );
  }
  catch ( std::invalid_argument const& e )
  {
    throw BenchError( std::string( "bad config: " ) + e.what() );
  }
  return c;
}

/* --------------------------------------------------------------------
 * Sets and keys
 * ------------------------------------------------------------------ */

struct BenchEntry
{
  std::string id;
  std::string verilog;
  std::string sha256;
};

struct BenchmarkSet
{
  std::string set_name;
  std::vector<BenchEntry> entries; ///< sorted by id
  nlohmann::json manifest;
};

struct KeyEntry
{
  std::string id;
  std::string golden;
  int recipe = 0;     ///< built-in id, 0 for user recipes
  uint32_t recipe_index = 0; ///< position in the configured pool
  uint32_t k = 0;
  std::optional<TrojanRecord> trojan;
  uint64_t variant_seed = 0;
  uint64_t trojan_seed = 0;
  uint64_t recipe_seed = 0;
  std::vector<std::string> regenerations; ///< why earlier insertion attempts were dropped
};

struct AnswerKey
{
  std::string set_name;
  std::string manifest_checksum;
  std::string release_date;
  std::string expiry_date;
  std::vector<KeyEntry> entries; ///< sorted by id

  KeyEntry const& at( std::string const& id ) const
  {
    auto it = std::lower_bound( entries.begin(), entries.end(), id,
                                []( KeyEntry const& e, std::string const& s ) { return e.id < s; } );
    if ( it == entries.end() || it->id != id )
      throw BenchError( "unknown circuit id '" + id + "'" );
    return *it;
  }
};

inline nlohmann::json to_json( KeyEntry const& e )
{
  nlohmann::json j{ { "id", e.id },
                    { "golden", e.golden },
                    { "recipe", e.recipe },
                    { "recipe_index", e.recipe_index },
                    { "k", e.k },
                    { "seeds", { { "variant", e.variant_seed }, { "trojan", e.trojan_seed }, { "recipe", e.recipe_seed } } },
                    { "regenerations", e.regenerations } };
  j["trojan"] = e.trojan ? to_json( *e.trojan ) : nlohmann::json();
  return j;
}

inline nlohmann::json key_body( AnswerKey const& k )
{
  nlohmann::json entries = nlohmann::json::array();
  for ( auto const& e : k.entries )
    entries.push_back( to_json( e ) );
  return { { "set_name", k.set_name },
           { "format_version", bench_format_version },
           { "manifest_checksum", k.manifest_checksum },
           { "release_date", k.release_date },
           { "expiry_date", k.expiry_date },
           { "entries", entries } };
}

/// Key JSON with a checksum over the rest of its body.
inline nlohmann::json to_json( AnswerKey const& k )
{
  auto j = key_body( k );
  j["checksum"] = detail::sha256_hex( j.dump() );
  return j;
}

inline AnswerKey answer_key_from_json( nlohmann::json const& j )
{
  AnswerKey k;
  try
  {
    k.set_name = j.at( "set_name" ).get<std::string>();
    k.manifest_checksum = j.at( "manifest_checksum" ).get<std::string>();
    k.release_date = j.at( "release_date" ).get<std::string>();
    k.expiry_date = j.at( "expiry_date" ).get<std::string>();
    for ( auto const& e : j.at( "entries" ) )
    {
      KeyEntry x;
      x.id = e.at( "id" ).get<std::string>();
      x.golden = e.at( "golden" ).get<std::string>();
      x.recipe = e.at( "recipe" ).get<int>();
      x.recipe_index = e.value( "recipe_index", 0u );
      x.k = e.at( "k" ).get<uint32_t>();
      if ( x.k > 1 )
        throw BenchError( "entry '" + x.id + "' has k outside {0, 1}" );
      if ( !e.at( "trojan" ).is_null() )
        x.trojan = trojan_record_from_json( e["trojan"] );
      auto const& s = e.at( "seeds" );
      x.variant_seed = s.at( "variant" ).get<uint64_t>();
      x.trojan_seed = s.at( "trojan" ).get<uint64_t>();
      x.recipe_seed = s.at( "recipe" ).get<uint64_t>();
      x.regenerations = e.value( "regenerations", std::vector<std::string>{} );
      k.entries.push_back( std::move( x ) );
    }
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw BenchError( std::string( "malformed answer key: " ) + e.what() );
  }
  if ( j.contains( "checksum" ) && j["checksum"] != detail::sha256_hex( key_body( k ).dump() ) )
    throw BenchError( "answer key checksum mismatch" );
  std::sort( k.entries.begin(), k.entries.end(), []( auto const& a, auto const& b ) { return a.id < b.id; } );
  return k;
}

namespace detail
{

/// Port names in order, used to match variants to golden circuits.
inline std::string port_signature( Netlist const& n )
{
  std::string s;
  for ( auto p : n.inputs )
    s += n.net_name( p ) + ",";
  s += "|";
  for ( auto p : n.outputs )
    s += n.net_name( p ) + ",";
  return s;
}

/* Renames internal nets to n0, n1, ... and instances to g0, g1, ... in
 * topological gate order; port names stay, the module takes `module`. */
inline Netlist anonymize( Netlist const& n, std::string const& module )
{
  require_valid( n );
  auto const c = connectivity( n );
  std::set<std::string> taken;
  for ( auto const* ports : { &n.inputs, &n.outputs } )
    for ( auto p : *ports )
      taken.insert( n.net_name( p ) );

  /* Kahn order, ties by original position */
  std::vector<uint32_t> pending( n.gates.size() );
  std::vector<std::vector<uint32_t>> users( n.num_nets() );
  for ( uint32_t k = 0; k < n.gates.size(); ++k )
    for ( auto in : n.gates[k].inputs )
      if ( c.driver[in] >= 0 )
      {
        ++pending[k];
        users[in].push_back( k );
      }
  std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
  for ( uint32_t k = 0; k < n.gates.size(); ++k )
    if ( !pending[k] )
      ready.push( k );
  std::vector<uint32_t> order;
  while ( !ready.empty() )
  {
    auto const k = ready.top();
    ready.pop();
    order.push_back( k );
    for ( auto u : users[n.gates[k].output] )
      if ( --pending[u] == 0 )
        ready.push( u );
  }

  Netlist out( module );
  std::vector<std::optional<NetId>> map( n.num_nets() );
  for ( auto p : n.inputs )
    map[p] = out.add_input( n.net_name( p ) );
  uint64_t next_net = 0, next_inst = 0;
  auto fresh = [&]( char prefix, uint64_t& counter ) {
    std::string s;
    do
      s = prefix + std::to_string( counter++ );
    while ( taken.count( s ) );
    return s;
  };
  std::vector<uint8_t> is_po( n.num_nets(), 0 );
  for ( auto p : n.outputs )
    is_po[p] = 1;
  for ( auto k : order )
  {
    auto const& g = n.gates[k];
    std::vector<NetId> ins;
    for ( auto in : g.inputs )
      ins.push_back( n.is_constant( in ) ? out.constant( *n.constant_value( in ) ) : *map[in] );
    auto const name = is_po[g.output] ? n.net_name( g.output ) : fresh( 'n', next_net );
    map[g.output] = out.add_gate( g.kind, std::move( ins ), name, fresh( 'g', next_inst ) );
  }
  for ( auto p : n.outputs )
    out.outputs.push_back( n.is_constant( p ) ? out.constant( *n.constant_value( p ) ) : *map[p] );
  return out;
}

inline std::string entry_id( uint64_t index, uint64_t total )
{
  auto const width = std::max<std::size_t>( 4, std::to_string( total ? total - 1 : 0 ).size() );
  auto s = std::to_string( index );
  return "c" + std::string( width - s.size(), '0' ) + s;
}

} // namespace detail

/* Builds a set: per golden circuit `variants` variants, each optionally
 * infected (decided before and independently of the recipe draw), then
 * restructured, checked and anonymized.  A pure function of `cfg`. */
inline std::pair<BenchmarkSet, AnswerKey> forge_benchmark( ForgeConfig const& cfg,
                                                           std::function<void( std::string const& )> const& log = {} )
{
  if ( cfg.golden.empty() )
    throw BenchError( "no golden circuits" );
  if ( cfg.variants < 1 )
    throw BenchError( "variants per golden must be at least 1" );
  if ( !( cfg.infection_rate >= 0.0 && cfg.infection_rate <= 1.0 ) )
    throw BenchError( "infection rate must lie in [0, 1]" );
  if ( !cfg.infected_counts.empty() )
  {
    if ( cfg.infected_counts.size() != cfg.golden.size() )
      throw BenchError( "infected_counts needs one entry per golden circuit" );
    for ( auto c : cfg.infected_counts )
      if ( c > cfg.variants )
        throw BenchError( "infected count exceeds variants per golden" );
  }
  if ( cfg.trojan.q_values.empty() )
    throw BenchError( "no trigger widths given" );
  for ( auto q : cfg.trojan.q_values )
    if ( q < 2 )
      throw BenchError( "trigger width must be at least 2" );
  auto const release = parse_date( cfg.release_date );
  std::vector<Recipe> pool = cfg.recipes;
  if ( pool.empty() )
    for ( int id = 1; id <= num_builtin_recipes; ++id )
      pool.push_back( builtin_recipe( id ) );
  for ( auto const& r : pool )
    validate_recipe( r );
  std::set<std::string> signatures, names;
  for ( auto const& g : cfg.golden )
  {
    require_valid( g.netlist );
    if ( !signatures.insert( detail::port_signature( g.netlist ) ).second )
      throw BenchError( "golden circuit '" + g.name + "' shares its port signature with another" );
    if ( !names.insert( g.name ).second )
      throw BenchError( "duplicate golden name '" + g.name + "'" );
  }

  auto const total = static_cast<uint64_t>( cfg.golden.size() ) * cfg.variants;
  std::vector<uint64_t> perm( total );
  for ( uint64_t k = 0; k < total; ++k )
    perm[k] = k;
  Rng id_rng( derive_seed( cfg.seed, 0x1d ) );
  id_rng.shuffle( perm );

  BenchmarkSet set;
  set.set_name = cfg.set_name;
  AnswerKey key;
  key.set_name = cfg.set_name;
  key.release_date = format_date( release );
  key.expiry_date = format_date( add_years( release, 3 ) );

  for ( std::size_t gi = 0; gi < cfg.golden.size(); ++gi )
  {
    auto const& golden = cfg.golden[gi];
    std::vector<uint8_t> infected( cfg.variants, 0 );
    Rng inf_rng( derive_seed( derive_seed( cfg.seed, 1 ), gi ) );
    if ( !cfg.infected_counts.empty() )
    {
      std::fill_n( infected.begin(), cfg.infected_counts[gi], 1 );
      inf_rng.shuffle( infected );
    }
    else
      for ( auto& f : infected )
        f = inf_rng.bernoulli( cfg.infection_rate );

    for ( uint32_t vi = 0; vi < cfg.variants; ++vi )
    {
      auto const index = gi * cfg.variants + vi;
      KeyEntry e;
      e.id = detail::entry_id( perm[index], total );
      e.golden = golden.name;
      e.variant_seed = derive_seed( derive_seed( cfg.seed, 2 ), index );

      Netlist pre = golden.netlist;
      if ( infected[vi] )
      {
        Rng q_rng( derive_seed( e.variant_seed, 1 ) );
        for ( uint32_t attempt = 0; attempt <= cfg.max_regenerations && !e.trojan; ++attempt )
        {
          TrojanSpec spec;
          spec.q = q_rng.pick( cfg.trojan.q_values );
          if ( cfg.trojan.p )
            spec.p = std::min( *cfg.trojan.p, spec.q );
          spec.metric = cfg.trojan.metric;
          spec.threshold = cfg.trojan.threshold;
          spec.vectors = cfg.trojan.vectors;
          spec.witness_budget = cfg.trojan.witness_budget;
          spec.seed = derive_seed( e.variant_seed, 16 + attempt );
          try
          {
            auto [inf, rec] = insert_trojan( golden.netlist, spec );
            auto const v = check_trojan_semantics( golden.netlist, inf, rec, cfg.check );
            if ( !v.pass )
              throw BenchError( "generation bug: inserted Trojan in '" + golden.name + "' fails its check (" + v.reason + ")" );
            pre = std::move( inf );
            e.trojan = std::move( rec );
            e.trojan_seed = spec.seed;
            e.k = 1;
          }
          catch ( TrojanError const& err )
          {
            e.regenerations.push_back( err.what() );
            if ( log )
              log( golden.name + " variant " + std::to_string( vi ) + ": regenerating (" + err.what() + ")" );
          }
        }
        if ( !e.trojan )
          throw BenchError( "could not infect '" + golden.name + "' after " +
                            std::to_string( cfg.max_regenerations + 1 ) + " attempts: " + e.regenerations.back() );
      }

      Rng recipe_rng( derive_seed( e.variant_seed, 2 ) );
      e.recipe_index = static_cast<uint32_t>( recipe_rng.below( pool.size() ) );
      auto const& recipe = pool[e.recipe_index];
      e.recipe = recipe.id;
      e.recipe_seed = derive_seed( e.variant_seed, 3 );
      Netlist out;
      try
      {
        ApplyOptions opt;
        opt.check = cfg.check;
        out = apply_recipe( pre, recipe, e.recipe_seed, opt ).first;
      }
      catch ( EquivalenceFailure const& err )
      {
        throw BenchError( "generation bug: " + std::string( err.what() ) + " on '" + golden.name + "'; set aborted" );
      }
      if ( e.trojan )
      {
        auto const& w = *e.trojan->witness;
        if ( !detail::outputs_differ( golden.netlist, out, w ) )
          throw BenchError( "generation bug: witness lost after restructuring '" + golden.name + "'" );
      }

      auto const anon = detail::anonymize( out, e.id );
      require_valid( anon );
      BenchEntry b{ e.id, write_netlist( anon ), {} };
      b.sha256 = detail::sha256_hex( b.verilog );
      set.entries.push_back( std::move( b ) );
      key.entries.push_back( std::move( e ) );
      if ( log )
        log( "forged " + key.entries.back().id );
    }
  }

  auto by_id = []( auto const& a, auto const& b ) { return a.id < b.id; };
  std::sort( set.entries.begin(), set.entries.end(), by_id );
  std::sort( key.entries.begin(), key.entries.end(), by_id );

  std::string lines;
  nlohmann::json entries = nlohmann::json::array();
  for ( auto const& b : set.entries )
  {
    lines += b.id + " " + b.sha256 + "\n";
    entries.push_back( { { "id", b.id }, { "file", "circuits/" + b.id + ".v" }, { "sha256", b.sha256 } } );
  }
  auto const checksum = detail::sha256_hex( lines );
  set.manifest = { { "set_name", cfg.set_name },
                   { "format_version", bench_format_version },
                   { "entry_count", set.entries.size() },
                   { "entries", entries },
                   { "release_date", key.release_date },
                   { "expiry_date", key.expiry_date },
                   { "checksum", checksum },
                   { "provenance",
                     { { "tool", "forge" },
                       { "version", forge_version },
                       { "config_sha256", detail::sha256_hex( config_to_json( cfg ).dump() ) },
                       { "seed", cfg.seed } } } };
  key.manifest_checksum = checksum;
  return { std::move( set ), std::move( key ) };
}

/// Writes `<dir>/manifest.json`, `<dir>/circuits/<id>.v` and the key file.
inline void write_benchmark( BenchmarkSet const& set, AnswerKey const& key, std::filesystem::path const& dir,
                             std::filesystem::path const& key_path )
{
  namespace fs = std::filesystem;
  fs::create_directories( dir / "circuits" );
  auto put = []( fs::path const& p, std::string const& text ) {
    std::ofstream f( p, std::ios::binary );
    if ( !f )
      throw BenchError( "cannot write " + p.string() );
    f << text;
  };
  for ( auto const& e : set.entries )
    put( dir / "circuits" / ( e.id + ".v" ), e.verilog );
  put( dir / "manifest.json", set.manifest.dump( 2 ) + "\n" );
  if ( key_path.has_parent_path() )
    fs::create_directories( key_path.parent_path() );
  put( key_path, to_json( key ).dump( 2 ) + "\n" );
}

/// Default key location: next to the set directory, `<set>.key.json`.
inline std::filesystem::path default_key_path( std::filesystem::path dir )
{
  if ( !dir.has_filename() )
    dir = dir.parent_path();
  return dir.parent_path() / ( dir.filename().string() + ".key.json" );
}

/* --------------------------------------------------------------------
 * Submissions and scoring
 * ------------------------------------------------------------------ */

struct Submission
{
  std::string set_name;
  std::string submitter;
  std::string timestamp;
  std::vector<std::pair<std::string, bool>> verdicts; ///< (id, infected)
};

/// Parses `circuit_id,label` CSV with labels infected / clean.
inline Submission parse_submission_csv( std::string const& text )
{
  Submission s;
  std::istringstream in( text );
  std::string line;
  std::size_t row = 0;
  bool header = false;
  std::set<std::string> seen;
  auto trim = []( std::string x ) {
    auto const b = x.find_first_not_of( " \t\r" );
    auto const e = x.find_last_not_of( " \t\r" );
    return b == std::string::npos ? std::string() : x.substr( b, e - b + 1 );
  };
  while ( std::getline( in, line ) )
  {
    ++row;
    line = trim( line );
    if ( line.empty() )
      continue;
    auto const comma = line.find( ',' );
    if ( comma == std::string::npos || line.find( ',', comma + 1 ) != std::string::npos )
      throw BenchError( "submission line " + std::to_string( row ) + ": expected two fields" );
    auto const id = trim( line.substr( 0, comma ) ), label = trim( line.substr( comma + 1 ) );
    if ( !header )
    {
      if ( id != "circuit_id" || label != "label" )
        throw BenchError( "submission header must be 'circuit_id,label'" );
      header = true;
      continue;
    }
    if ( label != "infected" && label != "clean" )
      throw BenchError( "submission line " + std::to_string( row ) + ": label must be infected or clean" );
    if ( !seen.insert( id ).second )
      throw BenchError( "duplicate verdict for '" + id + "'" );
    s.verdicts.emplace_back( id, label == "infected" );
  }
  if ( !header )
    throw BenchError( "empty submission" );
  return s;
}

inline std::string submission_to_csv( Submission const& s )
{
  std::string out = "circuit_id,label\n";
  for ( auto const& [id, inf] : s.verdicts )
    out += id + "," + ( inf ? "infected" : "clean" ) + "\n";
  return out;
}

/// (1 - FP rate) / (1/alpha + FN rate).
inline double confidence_value( double fp_rate, double fn_rate, double alpha )
{
  if ( !( alpha > 0 ) )
    throw BenchError( "alpha must be positive" );
  return ( 1.0 - fp_rate ) / ( 1.0 / alpha + fn_rate );
}

struct Outcomes
{
  uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
};

struct ConfusionReport
{
  Outcomes total;
  double fp_rate = 0, fn_rate = 0;
  double alpha = 0, conf_val = 0;
  std::vector<std::pair<std::string, Outcomes>> per_golden;
  /// Per-entry truth, only once the key has expired.
  std::optional<std::vector<std::tuple<std::string, bool, bool>>> entries;
};

inline nlohmann::json to_json( Outcomes const& o )
{
  return { { "tp", o.tp }, { "tn", o.tn }, { "fp", o.fp }, { "fn", o.fn } };
}

inline nlohmann::json to_json( ConfusionReport const& r )
{
  nlohmann::json j = to_json( r.total );
  j["fp_rate"] = r.fp_rate;
  j["fn_rate"] = r.fn_rate;
  j["alpha"] = r.alpha;
  j["conf_val"] = r.conf_val;
  j["per_golden"] = nlohmann::json::array();
  for ( auto const& [g, o] : r.per_golden )
  {
    auto x = to_json( o );
    x["golden"] = g;
    j["per_golden"].push_back( x );
  }
  if ( r.entries )
  {
    j["entries"] = nlohmann::json::array();
    for ( auto const& [id, truth, said] : *r.entries )
      j["entries"].push_back( { { "id", id }, { "infected", truth }, { "verdict", said ? "infected" : "clean" } } );
  }
  return j;
}

/* Rates are FP/(FP+TN) and FN/(FN+TP); an empty class gives rate 0. */
inline ConfusionReport score_submission( Submission const& sub, AnswerKey const& key, double alpha,
                                         bool key_expired = false )
{
  if ( !( alpha > 0 ) )
    throw BenchError( "alpha must be positive" );
  std::map<std::string, bool> said;
  for ( auto const& [id, inf] : sub.verdicts )
    if ( !said.emplace( id, inf ).second )
      throw BenchError( "duplicate verdict for '" + id + "'" );
  for ( auto const& [id, inf] : said )
    key.at( id );
  std::vector<std::string> missing;
  for ( auto const& e : key.entries )
    if ( !said.count( e.id ) )
      missing.push_back( e.id );
  if ( !missing.empty() )
    throw BenchError( "submission misses " + std::to_string( missing.size() ) + " id(s), first '" + missing.front() + "'" );

  ConfusionReport r;
  r.alpha = alpha;
  std::map<std::string, Outcomes> per;
  if ( key_expired )
    r.entries.emplace();
  for ( auto const& e : key.entries )
  {
    bool const truth = e.k == 1, guess = said.at( e.id );
    auto bump = [&]( Outcomes& o ) {
      ( truth ? ( guess ? o.tp : o.fn ) : ( guess ? o.fp : o.tn ) )++;
    };
    bump( r.total );
    bump( per[e.golden] );
    if ( r.entries )
      r.entries->emplace_back( e.id, truth, guess );
  }
  auto const& t = r.total;
  r.fp_rate = t.fp + t.tn ? static_cast<double>( t.fp ) / static_cast<double>( t.fp + t.tn ) : 0.0;
  r.fn_rate = t.fn + t.tp ? static_cast<double>( t.fn ) / static_cast<double>( t.fn + t.tp ) : 0.0;
  r.conf_val = confidence_value( r.fp_rate, r.fn_rate, alpha );
  r.per_golden.assign( per.begin(), per.end() );
  return r;
}

/* --------------------------------------------------------------------
 * Judging cadence
 * ------------------------------------------------------------------ */

struct JudgePolicy
{
  Date release;
  Date expiry; ///< release + 3 years
};

inline JudgePolicy judge_policy( AnswerKey const& key )
{
  return { parse_date( key.release_date ), parse_date( key.expiry_date ) };
}

struct Deferred
{
  Date release; ///< when the report will be issued
};

/* Reports go out on the first day of each month; anything else is queued
 * until then.  Nothing is accepted once the set has expired. */
inline std::variant<ConfusionReport, Deferred> judge_window( JudgePolicy const& policy, Date const& submitted,
                                                             Submission const& sub, AnswerKey const& key, double alpha )
{
  if ( submitted >= policy.expiry )
    throw BenchError( "benchmark retired" );
  if ( submitted.day() == std::chrono::day( 1 ) )
    return score_submission( sub, key, alpha );
  return Deferred{ first_of_next_month( submitted ) };
}

/// The key becomes public on the expiry date.
inline nlohmann::json export_key( AnswerKey const& key, Date const& today )
{
  auto const expiry = parse_date( key.expiry_date );
  if ( today < expiry )
    throw BenchError( "answer key is sealed until " + key.expiry_date );
  return to_json( key );
}

} // namespace forge
