// forge: command-line front end for the forge header library.
//
// Exit codes: 0 success, 1 domain negative (counterexample, failed
// insertion, retired set), 2 usage, configuration or I/O error.

#include <forge/analysis.hpp>
#include <forge/analytics.hpp>
#include <forge/bench.hpp>
#include <forge/equiv.hpp>
#include <forge/netlist.hpp>
#include <forge/recipe.hpp>
#include <forge/trojan.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace forge;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

int log_level = 1; // 0 quiet, 1 info, 2 debug

void info( std::string const& s )
{
  if ( log_level >= 1 )
    std::cerr << "forge: " << s << "\n";
}

std::string read_file( fs::path const& p )
{
  std::ifstream f( p, std::ios::binary );
  if ( !f )
    throw UsageError( "cannot read " + p.string() );
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_file( fs::path const& p, std::string const& text )
{
  if ( p.has_parent_path() )
    fs::create_directories( p.parent_path() );
  std::ofstream f( p, std::ios::binary );
  if ( !f )
    throw UsageError( "cannot write " + p.string() );
  f << text;
}

json read_json( fs::path const& p )
{
  try
  {
    return json::parse( read_file( p ) );
  }
  catch ( json::parse_error const& e )
  {
    throw UsageError( p.string() + ": " + e.what() );
  }
}

Netlist load_netlist( fs::path const& p ) { return parse_netlist( read_file( p ) ); }

/// --seed when given, else FORGE_SEED, else `fallback`.
uint64_t effective_seed( std::optional<uint64_t> const& flag, uint64_t fallback = 0 )
{
  if ( flag )
    return *flag;
  if ( auto const* env = std::getenv( "FORGE_SEED" ) )
    return std::stoull( env );
  return fallback;
}

json provenance( json const& config, uint64_t seed )
{
  return { { "tool", "forge" }, { "version", forge_version }, { "config_sha256", detail::sha256_hex( config.dump() ) }, { "seed", seed } };
}

void emit( json const& j, std::string const& out )
{
  if ( out.empty() || out == "-" )
    std::cout << j.dump( 2 ) << "\n";
  else
    write_file( out, j.dump( 2 ) + "\n" );
}

Date today()
{
  return Date{ std::chrono::floor<std::chrono::days>( std::chrono::system_clock::now() ) };
}

std::vector<std::string> split_csv_line( std::string line )
{
  if ( !line.empty() && line.back() == '\r' )
    line.pop_back();
  std::vector<std::string> out;
  std::stringstream s( line );
  std::string cell;
  while ( std::getline( s, cell, ',' ) )
    out.push_back( cell );
  return out;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "forge: restructured hardware-Trojan benchmark generator and judge" };
  app.require_subcommand( 1 );
  std::string level = "info";
  unsigned threads = 1;
  app.add_option( "--log-level", level, "quiet, info or debug" )->check( CLI::IsMember( { "quiet", "info", "debug" } ) );
  app.add_option( "--threads", threads, "worker threads (work is currently sequential)" )->check( CLI::PositiveNumber );

  std::function<int()> action;

  /* parse */
  std::string parse_in;
  bool parse_json = false;
  auto* parse = app.add_subcommand( "parse", "validate a netlist and print it canonically" );
  parse->add_option( "file", parse_in, "structural Verilog file" )->required();
  parse->add_flag( "--json", parse_json, "print the JSON dump instead of Verilog" );
  parse->callback( [&] {
    action = [&] {
      auto const n = load_netlist( parse_in );
      for ( auto const& d : lint( n ) )
        info( "lint: " + d.message );
      std::cout << ( parse_json ? netlist_to_json( n ).dump( 2 ) + "\n" : write_netlist( n ) );
      return 0;
    };
  } );

  /* restructure */
  std::string rs_in, rs_out, rs_report, rs_recipe_file;
  std::optional<int> rs_recipe;
  std::optional<uint64_t> rs_seed;
  bool rs_check = true;
  auto* restructure = app.add_subcommand( "restructure", "apply a restructuring recipe" );
  restructure->add_option( "file", rs_in )->required();
  auto* rs_id = restructure->add_option( "--recipe", rs_recipe, "built-in recipe 1..18" )->check( CLI::Range( 1, num_builtin_recipes ) );
  auto* rs_file = restructure->add_option( "--recipe-file", rs_recipe_file, "JSON list of {pass, params, seed}" );
  rs_id->excludes( rs_file );
  restructure->add_option( "--seed", rs_seed );
  restructure->add_option( "-o,--output", rs_out )->required();
  restructure->add_option( "--report", rs_report, "per-pass report (JSON)" );
  restructure->add_flag( "!--no-check", rs_check, "skip the equivalence check after each pass" );
  restructure->callback( [&] {
    action = [&] {
      if ( !rs_recipe && rs_recipe_file.empty() )
        throw UsageError( "give --recipe or --recipe-file" );
      auto const n = load_netlist( rs_in );
      auto const recipe = rs_recipe ? builtin_recipe( *rs_recipe ) : recipe_from_json( read_json( rs_recipe_file ) );
      auto const seed = effective_seed( rs_seed );
      ApplyOptions opt;
      opt.check_each_pass = rs_check;
      opt.check.seed = seed;
      auto [out, reports] = apply_recipe( n, recipe, seed, opt );
      write_file( rs_out, write_netlist( out ) );
      json passes = json::array();
      for ( auto const& r : reports )
        passes.push_back( to_json( r ) );
      json const cfg{ { "recipe", recipe_to_json( recipe ) }, { "input_sha256", detail::sha256_hex( write_netlist( n ) ) } };
      json const rep{ { "passes", passes }, { "gates_before", n.gates.size() }, { "gates_after", out.gates.size() },
                      { "provenance", provenance( cfg, seed ) } };
      emit( rep, rs_report );
      return 0;
    };
  } );

  /* insert */
  std::string ins_in, ins_out, ins_record, ins_metric = "signal-prob-low", ins_victim;
  std::vector<std::string> ins_trigger;
  TrojanSpec spec;
  std::optional<uint64_t> ins_seed;
  std::optional<uint32_t> ins_p;
  auto* insert = app.add_subcommand( "insert", "insert a combinational Trojan" );
  insert->add_option( "file", ins_in )->required();
  insert->add_option( "-q", spec.q, "trigger width" )->check( CLI::Range( 2, 64 ) );
  insert->add_option( "-p", ins_p, "trigger nets taken from rare nets" );
  insert->add_option( "--metric", ins_metric )->check( CLI::IsMember( { "signal-prob-low", "signal-prob-high", "scoap-hard" } ) );
  insert->add_option( "--threshold", spec.threshold );
  insert->add_option( "--vectors", spec.vectors, "samples for signal probabilities" );
  insert->add_option( "--witness-budget", spec.witness_budget );
  insert->add_option( "--trigger", ins_trigger, "explicit trigger net, as NET or !NET" );
  insert->add_option( "--victim", ins_victim, "explicit victim net" );
  insert->add_option( "--seed", ins_seed );
  insert->add_option( "-o,--output", ins_out )->required();
  insert->add_option( "--record", ins_record, "Trojan record (JSON)" );
  insert->callback( [&] {
    action = [&] {
      auto const n = load_netlist( ins_in );
      spec.p = ins_p;
      spec.metric = rare_metric_from_string( ins_metric );
      spec.seed = effective_seed( ins_seed );
      for ( auto const& t : ins_trigger )
        spec.trigger.emplace_back( t[0] == '!' ? t.substr( 1 ) : t, t[0] != '!' );
      if ( !ins_victim.empty() )
        spec.victim = ins_victim;
      auto const [inf, rec] = insert_trojan( n, spec );
      write_file( ins_out, write_netlist( inf ) );
      json cfg{ { "q", spec.q }, { "metric", ins_metric }, { "threshold", spec.threshold }, { "trigger", ins_trigger },
                { "victim", ins_victim }, { "input_sha256", detail::sha256_hex( write_netlist( n ) ) } };
      auto j = to_json( rec );
      j["provenance"] = provenance( cfg, spec.seed );
      emit( j, ins_record );
      return 0;
    };
  } );

  /* aig */
  std::string aig_in, aig_out, aig_format = "ascii";
  auto* aig = app.add_subcommand( "aig", "and-inverter graph utilities" );
  aig->require_subcommand( 1 );
  auto* aig_export = aig->add_subcommand( "export", "write AIGER" );
  aig_export->add_option( "file", aig_in )->required();
  aig_export->add_option( "--format", aig_format )->check( CLI::IsMember( { "ascii", "binary" } ) );
  aig_export->add_option( "-o,--output", aig_out )->required();
  aig_export->callback( [&] {
    action = [&] {
      auto const g = strash( to_aig( load_netlist( aig_in ) ) );
      write_file( aig_out, aig_format == "ascii" ? write_aiger_ascii( g ) : write_aiger_binary( g ) );
      return 0;
    };
  } );

  /* analyze */
  std::string an_in, an_json;
  bool an_scoap = false;
  std::optional<uint64_t> an_sigprob, an_seed;
  auto* analyze = app.add_subcommand( "analyze", "testability measures per net" );
  analyze->add_option( "file", an_in )->required();
  analyze->add_flag( "--scoap", an_scoap, "SCOAP controllability and observability" );
  analyze->add_option( "--sigprob", an_sigprob, "signal probabilities from N random vectors (0: exact)" );
  analyze->add_option( "--seed", an_seed );
  analyze->add_option( "--json", an_json, "output file (default stdout)" );
  analyze->callback( [&] {
    action = [&] {
      auto const n = load_netlist( an_in );
      std::optional<ScoapValues> s;
      std::optional<NetStats> st;
      if ( an_scoap )
        s = scoap( n );
      auto const seed = effective_seed( an_seed );
      if ( an_sigprob )
        st = *an_sigprob == 0 ? exact_signal_prob( n ) : signal_prob( n, *an_sigprob, seed );
      json const cfg{ { "scoap", an_scoap }, { "sigprob", an_sigprob ? json( *an_sigprob ) : json() },
                      { "input_sha256", detail::sha256_hex( write_netlist( n ) ) } };
      json const out{ { "nets", analysis_to_json( n, s ? &*s : nullptr, st ? &*st : nullptr ) },
                      { "saturated", s && s->saturated },
                      { "provenance", provenance( cfg, seed ) } };
      emit( out, an_json );
      return 0;
    };
  } );

  /* equiv */
  std::string eq_a, eq_b;
  EquivConfig eq_cfg;
  std::optional<uint64_t> eq_seed;
  auto* equiv = app.add_subcommand( "equiv", "combinational equivalence check" );
  equiv->add_option( "a", eq_a )->required();
  equiv->add_option( "b", eq_b )->required();
  equiv->add_option( "--exhaustive-bound", eq_cfg.exhaustive_bound );
  equiv->add_option( "--vectors", eq_cfg.vectors );
  equiv->add_option( "--search-budget", eq_cfg.search_budget );
  equiv->add_option( "--seed", eq_seed );
  equiv->callback( [&] {
    action = [&] {
      eq_cfg.seed = effective_seed( eq_seed );
      auto const v = check_equivalence( load_netlist( eq_a ), load_netlist( eq_b ), eq_cfg );
      std::cout << to_json( v ).dump( 2 ) << "\n";
      return v.equivalent() ? 0 : v.refuted() ? 1 : 2;
    };
  } );

  /* bench */
  std::string bench_cfg, bench_out, bench_key;
  auto* bench = app.add_subcommand( "bench", "forge a blind benchmark set" );
  bench->add_option( "--config", bench_cfg )->required();
  bench->add_option( "-o,--output", bench_out, "set directory" )->required();
  bench->add_option( "--key", bench_key, "answer key path (default <set>.key.json)" );
  bench->callback( [&] {
    action = [&] {
      auto const base = fs::path( bench_cfg ).parent_path();
      auto j = read_json( bench_cfg );
      if ( auto const* env = std::getenv( "FORGE_SEED" ) )
        j["seed"] = std::stoull( env );
      auto const cfg = forge_config_from_json( j, [&]( std::string const& p ) {
        auto const path = fs::path( p ).is_absolute() ? fs::path( p ) : base / p;
        return load_netlist( path );
      } );
      auto const [set, key] = forge_benchmark( cfg, log_level >= 2 ? std::function<void( std::string const& )>( info )
                                                                    : std::function<void( std::string const& )>( [&]( std::string const& s ) {
                                                                        if ( s.find( "regenerating" ) != std::string::npos )
                                                                          info( s );
                                                                      } ) );
      auto const kp = bench_key.empty() ? default_key_path( bench_out ) : fs::path( bench_key );
      write_benchmark( set, key, bench_out, kp );
      std::cout << json{ { "set", bench_out },
                         { "key", kp.string() },
                         { "entries", set.entries.size() },
                         { "checksum", set.manifest["checksum"] },
                         { "key_checksum", to_json( key )["checksum"] },
                         { "provenance", set.manifest["provenance"] } }
                       .dump( 2 )
                << "\n";
      return 0;
    };
  } );

  /* judge */
  std::string jd_key, jd_sub, jd_date, jd_out;
  double jd_alpha = 1.0;
  auto* judge = app.add_subcommand( "judge", "score a detector submission" );
  judge->add_option( "--key", jd_key )->required();
  judge->add_option( "--submission", jd_sub, "CSV with circuit_id,label" )->required();
  judge->add_option( "--alpha", jd_alpha, "weight of false positives against false negatives" );
  judge->add_option( "--date", jd_date, "apply the monthly release window as of YYYY-MM-DD" );
  judge->add_option( "--report", jd_out, "report file (default stdout)" );
  judge->callback( [&] {
    action = [&] {
      auto const key = answer_key_from_json( read_json( jd_key ) );
      auto const sub = parse_submission_csv( read_file( jd_sub ) );
      json cfg{ { "key_checksum", to_json( key )["checksum"] }, { "submission_sha256", detail::sha256_hex( read_file( jd_sub ) ) },
                { "alpha", jd_alpha }, { "date", jd_date } };
      json rep;
      if ( jd_date.empty() )
        rep = to_json( score_submission( sub, key, jd_alpha ) );
      else
      {
        auto const w = judge_window( judge_policy( key ), parse_date( jd_date ), sub, key, jd_alpha );
        if ( auto const* d = std::get_if<Deferred>( &w ) )
        {
          score_submission( sub, key, jd_alpha ); // reject malformed submissions now
          rep = { { "status", "deferred" }, { "release", format_date( d->release ) } };
        }
        else
          rep = to_json( std::get<ConfusionReport>( w ) );
      }
      rep["set_name"] = key.set_name;
      rep["provenance"] = provenance( cfg, 0 );
      emit( rep, jd_out );
      return 0;
    };
  } );

  /* publish-key */
  std::string pk_key, pk_date, pk_out;
  auto* publish = app.add_subcommand( "publish-key", "release an answer key once its set has expired" );
  publish->add_option( "--key", pk_key )->required();
  publish->add_option( "--date", pk_date, "as of YYYY-MM-DD (default today)" );
  publish->add_option( "-o,--output", pk_out )->required();
  publish->callback( [&] {
    action = [&] {
      auto const key = answer_key_from_json( read_json( pk_key ) );
      write_file( pk_out, export_key( key, pk_date.empty() ? today() : parse_date( pk_date ) ).dump( 2 ) + "\n" );
      return 0;
    };
  } );

  /* features */
  std::string ft_set, ft_csv, ft_key;
  auto* features = app.add_subcommand( "features", "feature matrix of a benchmark set" );
  features->add_option( "set", ft_set, "set directory (with manifest.json) or a single .v file" )->required();
  features->add_option( "--csv", ft_csv, "output (default stdout)" );
  features->add_option( "--key", ft_key, "append a label column from an answer key" );
  features->callback( [&] {
    action = [&] {
      std::vector<std::pair<std::string, fs::path>> files;
      json manifest;
      if ( fs::is_directory( ft_set ) )
        manifest = read_json( fs::path( ft_set ) / "manifest.json" );
      if ( manifest.is_object() )
        for ( auto const& e : manifest.at( "entries" ) )
          files.emplace_back( e.at( "id" ).get<std::string>(), fs::path( ft_set ) / e.at( "file" ).get<std::string>() );
      else
        files.emplace_back( fs::path( ft_set ).stem().string(), ft_set );
      std::optional<AnswerKey> key;
      if ( !ft_key.empty() )
        key = answer_key_from_json( read_json( ft_key ) );
      std::ostringstream csv;
      csv << "id";
      for ( auto const& name : feature_names() )
        csv << "," << name;
      csv << ( key ? ",label\n" : "\n" );
      csv.precision( 17 );
      for ( auto const& [id, path] : files )
      {
        auto const f = extract_features( load_netlist( path ) );
        csv << id;
        for ( auto x : f )
          csv << "," << x;
        if ( key )
          csv << "," << key->at( id ).k;
        csv << "\n";
      }
      if ( ft_csv.empty() )
        std::cout << csv.str();
      else
        write_file( ft_csv, csv.str() );
      info( "feature layout version " + std::to_string( feature_version ) + ", " + std::to_string( files.size() ) + " rows" );
      return 0;
    };
  } );

  /* pca */
  std::string pca_csv, pca_coords, pca_svg, pca_model;
  std::size_t pca_k = 4;
  auto* pca = app.add_subcommand( "pca", "principal components of a feature matrix" );
  pca->add_option( "csv", pca_csv )->required();
  pca->add_option( "--components", pca_k )->check( CLI::PositiveNumber );
  pca->add_option( "--coords", pca_coords, "projected coordinates (CSV)" );
  pca->add_option( "--svg", pca_svg, "scatter plot" );
  pca->add_option( "--model", pca_model, "model JSON (default stdout)" );
  pca->callback( [&] {
    action = [&] {
      std::istringstream in( read_file( pca_csv ) );
      std::string line;
      if ( !std::getline( in, line ) )
        throw UsageError( "empty feature matrix" );
      auto const header = split_csv_line( line );
      bool const labeled = !header.empty() && header.back() == "label";
      std::vector<std::string> ids;
      std::vector<int> labels;
      Matrix rows;
      while ( std::getline( in, line ) )
      {
        auto cells = split_csv_line( line );
        if ( cells.empty() )
          continue;
        if ( cells.size() != header.size() )
          throw UsageError( "row '" + cells[0] + "' has " + std::to_string( cells.size() ) + " cells, header has " +
                            std::to_string( header.size() ) );
        ids.push_back( cells[0] );
        if ( labeled )
        {
          labels.push_back( std::stoi( cells.back() ) );
          cells.pop_back();
        }
        std::vector<double> r;
        for ( std::size_t i = 1; i < cells.size(); ++i )
          r.push_back( std::stod( cells[i] ) );
        rows.push_back( std::move( r ) );
      }
      auto const model = pca_fit( rows, pca_k );
      if ( !model.warning.empty() )
        info( "warning: " + model.warning );
      auto const coords = pca_project( model, rows );
      if ( !pca_coords.empty() )
      {
        std::ostringstream c;
        c.precision( 17 );
        c << "id";
        for ( std::size_t k = 0; k < pca_k; ++k )
          c << ",pc" << k + 1;
        c << ( labeled ? ",label\n" : "\n" );
        for ( std::size_t i = 0; i < rows.size(); ++i )
        {
          c << ids[i];
          for ( auto x : coords[i] )
            c << "," << x;
          if ( labeled )
            c << "," << labels[i];
          c << "\n";
        }
        write_file( pca_coords, c.str() );
      }
      if ( !pca_svg.empty() )
        write_file( pca_svg, scatter_svg( coords, labels ) );
      auto j = to_json( model );
      j["provenance"] = provenance( { { "csv_sha256", detail::sha256_hex( read_file( pca_csv ) ) }, { "components", pca_k } }, 0 );
      emit( j, pca_model );
      return 0;
    };
  } );

  /* space */
  std::string sp_profile;
  auto* space = app.add_subcommand( "space", "count candidate triggers for a strategy profile" );
  space->add_option( "--profile", sp_profile, "JSON {\"M\": int, \"strategies\": [{\"r\": int, \"g\": int}, ...]}" )->required();
  space->callback( [&] {
    action = [&] {
      auto const j = read_json( sp_profile );
      BigInt size;
      try
      {
        size = ht_space_size( strategy_profile_from_json( j ) );
      }
      catch ( std::invalid_argument const& e )
      {
        throw UsageError( e.what() );
      }
      std::cout << json{ { "size", size.str() }, { "digits", size.str().size() }, { "provenance", provenance( j, 0 ) } }.dump( 2 )
                << "\n";
      return 0;
    };
  } );

  /* game */
  uint64_t gm_nodes = 100, gm_k = 1, gm_trials = 100000;
  std::optional<uint64_t> gm_budget, gm_seed;
  std::string gm_seeker = "uniform";
  auto* game = app.add_subcommand( "game", "simulate the hide-and-seek game" );
  game->add_option( "--nodes", gm_nodes )->check( CLI::PositiveNumber );
  game->add_option( "--k", gm_k, "hidden objects" );
  game->add_option( "--trials", gm_trials );
  game->add_option( "--budget", gm_budget, "query budget (default: nodes)" );
  game->add_option( "--seeker", gm_seeker )->check( CLI::IsMember( { "uniform", "sequential" } ) );
  game->add_option( "--seed", gm_seed );
  game->callback( [&] {
    action = [&] {
      auto const seed = effective_seed( gm_seed );
      auto const budget = gm_budget.value_or( gm_nodes );
      auto const r = seek_simulate( gm_nodes, gm_k, HiderStrategy::uniform,
                                    gm_seeker == "uniform" ? SeekerStrategy::uniform : SeekerStrategy::sequential, gm_trials,
                                    seed, budget );
      auto j = to_json( r );
      if ( gm_k >= 1 && budget >= gm_nodes )
        j["expected"] = expected_game_length( gm_nodes, gm_k );
      j["provenance"] = provenance( { { "nodes", gm_nodes }, { "k", gm_k }, { "trials", gm_trials }, { "budget", budget }, { "seeker", gm_seeker } }, seed );
      std::cout << j.dump( 2 ) << "\n";
      return 0;
    };
  } );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::ParseError const& e )
  {
    return app.exit( e ) == 0 ? 0 : 2;
  }
  log_level = level == "quiet" ? 0 : level == "debug" ? 2 : 1;

  try
  {
    return action();
  }
  catch ( UsageError const& e )
  {
    std::cerr << "forge: " << e.what() << "\n";
    return 2;
  }
  catch ( ParseError const& e )
  {
    std::cerr << "forge: " << e.what() << "\n";
    return 2;
  }
  catch ( NetlistError const& e )
  {
    std::cerr << "forge: " << e.what() << "\n";
    return 2;
  }
  catch ( RecipeError const& e )
  {
    std::cerr << "forge: " << e.what() << "\n";
    return 2;
  }
  catch ( TrojanError const& e )
  {
    std::cerr << "forge: " << e.what() << "\n";
    return 1;
  }
  catch ( BenchError const& e )
  {
    std::cerr << "forge: " << e.what() << "\n";
    std::string const msg = e.what();
    bool const negative = msg == "benchmark retired" || msg.rfind( "answer key is sealed", 0 ) == 0 ||
                          msg.rfind( "could not infect", 0 ) == 0 || msg.rfind( "generation bug", 0 ) == 0;
    return negative ? 1 : 2;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "forge: " << e.what() << "\n";
    return 2;
  }
}
