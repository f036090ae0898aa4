#pragma once

/*!
  \file recipe.hpp
  \brief Restructuring recipes: pass pipelines applied to netlists

  A recipe is an ordered list of passes, each with parameters and a seed.
  Pipelines run on the AIG between parsing and writing; a `gate_size`
  pass selects how the AIG is written back to gates (multi-input ANDs,
  XOR recovery, inverting gates), and when it is not the last pass the
  netlist is re-read into a fresh AIG.
*/

#include "aig.hpp"
#include "detail/rng.hpp"
#include "equiv.hpp"
#include "restructure.hpp"

#include <json.hpp>

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge
{

inline constexpr char const* pass_names[] = { "strash", "balance", "rewrite", "refactor", "resub", "fraig", "gate_size" };

struct PassSpec
{
  std::string pass;
  nlohmann::json params = nlohmann::json::object();
  uint64_t seed = 0;
};

struct Recipe
{
  int id = 0; ///< 1..18 for the built-in recipes, 0 for user recipes
  std::vector<PassSpec> passes;
};

class RecipeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a pipeline result is not equivalent to its input.
class EquivalenceFailure : public std::logic_error
{
public:
  EquivalenceFailure( std::string pass, std::size_t index )
      : std::logic_error( "restructuring broke equivalence in pass " + std::to_string( index ) + " (" + pass + ")" ),
        pass_( std::move( pass ) ), index_( index )
  {
  }
  std::string const& pass() const { return pass_; }
  std::size_t index() const { return index_; }

private:
  std::string pass_;
  std::size_t index_;
};

inline bool is_pass_name( std::string const& s )
{
  return std::find_if( std::begin( pass_names ), std::end( pass_names ), [&]( char const* p ) { return s == p; } ) !=
         std::end( pass_names );
}

/// Checks names and the leading strash.
inline void validate_recipe( Recipe const& r )
{
  if ( r.passes.empty() || r.passes.front().pass != "strash" )
    throw RecipeError( "a recipe must begin with strash" );
  for ( auto const& p : r.passes )
  {
    if ( !is_pass_name( p.pass ) )
      throw RecipeError( "unknown pass '" + p.pass + "'" );
    if ( !p.params.is_object() && !p.params.is_null() )
      throw RecipeError( "parameters of pass '" + p.pass + "' must be an object" );
  }
}

inline nlohmann::json recipe_to_json( Recipe const& r )
{
  auto j = nlohmann::json::array();
  for ( auto const& p : r.passes )
    j.push_back( { { "pass", p.pass },
                   { "params", p.params.is_null() ? nlohmann::json::object() : p.params },
                   { "seed", p.seed } } );
  return j;
}

inline Recipe recipe_from_json( nlohmann::json const& j )
{
  if ( !j.is_array() )
    throw RecipeError( "recipe file must hold a JSON list of passes" );
  Recipe r;
  for ( auto const& e : j )
  {
    if ( !e.is_object() || !e.contains( "pass" ) || !e["pass"].is_string() )
      throw RecipeError( "each recipe entry needs a \"pass\" string" );
    PassSpec p;
    p.pass = e["pass"].get<std::string>();
    if ( e.contains( "params" ) )
      p.params = e["params"];
    if ( e.contains( "seed" ) )
      p.seed = e["seed"].get<uint64_t>();
    r.passes.push_back( std::move( p ) );
  }
  validate_recipe( r );
  return r;
}

/* --------------------------------------------------------------------
 * Built-in recipes
 * ------------------------------------------------------------------ */

namespace detail
{

inline PassSpec ps( std::string pass, nlohmann::json params = nlohmann::json::object(), uint64_t seed = 0 )
{
  return { std::move( pass ), std::move( params ), seed };
}

inline nlohmann::json gs( bool group, bool xr, bool inv )
{
  return { { "group_and", group }, { "detect_xor", xr }, { "inverting_gates", inv } };
}

} // namespace detail

inline constexpr int num_builtin_recipes = 18;

/// Built-in recipe `id` (1..18).
inline Recipe builtin_recipe( int id )
{
  using detail::gs;
  using detail::ps;
  using J = nlohmann::json;
  Recipe r;
  r.id = id;
  auto& p = r.passes;
  p.push_back( ps( "strash" ) );
  switch ( id )
  {
  case 1:
    p.push_back( ps( "balance" ) );
    break;
  case 2:
    p.push_back( ps( "rewrite", J{ { "cut_size", 4 } }, 2 ) );
    p.push_back( ps( "gate_size", gs( true, false, false ) ) );
    break;
  case 3:
    p.push_back( ps( "refactor", J{ { "max_cone_inputs", 10 } } ) );
    p.push_back( ps( "gate_size", gs( false, true, false ) ) );
    break;
  case 4:
    p.push_back( ps( "resub", J{ { "max_divisors", 50 } }, 4 ) );
    p.push_back( ps( "gate_size", gs( false, false, true ) ) );
    break;
  case 5:
    p.push_back( ps( "fraig", J{ { "sim_words", 4 }, { "exact_budget", 1000 } }, 5 ) );
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "gate_size", gs( true, true, false ) ) );
    break;
  case 6:
    p.push_back( ps( "rewrite", J{ { "cut_size", 4 } }, 6 ) );
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "gate_size", gs( true, false, true ) ) );
    break;
  case 7:
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "rewrite", J{ { "cut_size", 4 } }, 7 ) );
    p.push_back( ps( "gate_size", gs( false, true, false ) ) );
    break;
  case 8:
    p.push_back( ps( "refactor", J{ { "max_cone_inputs", 8 } } ) );
    p.push_back( ps( "rewrite", J{ { "cut_size", 3 } }, 8 ) );
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "gate_size", gs( false, true, true ) ) );
    break;
  case 9:
    p.push_back( ps( "resub", J{ { "max_divisors", 30 } }, 9 ) );
    p.push_back( ps( "refactor", J{ { "max_cone_inputs", 12 } } ) );
    p.push_back( ps( "gate_size", gs( true, true, true ) ) );
    break;
  case 10:
    p.push_back( ps( "fraig", J{ { "sim_words", 2 } }, 10 ) );
    p.push_back( ps( "rewrite", J{ { "cut_size", 4 } }, 10 ) );
    p.push_back( ps( "resub", J{ { "max_divisors", 50 } }, 10 ) );
    p.push_back( ps( "balance" ) );
    break;
  case 11:
    p.push_back( ps( "gate_size", gs( true, true, true ) ) );
    p.push_back( ps( "strash" ) );
    p.push_back( ps( "rewrite", J{ { "cut_size", 3 } }, 11 ) );
    p.push_back( ps( "gate_size", gs( true, false, false ) ) );
    break;
  case 12:
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "refactor", J{ { "max_cone_inputs", 6 }, { "zero_gain", true } } ) );
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "gate_size", gs( true, false, true ) ) );
    break;
  case 13:
    p.push_back( ps( "rewrite", J{ { "cut_size", 4 } }, 131 ) );
    p.push_back( ps( "rewrite", J{ { "cut_size", 5 } }, 132 ) );
    p.push_back( ps( "refactor", J{ { "max_cone_inputs", 10 } } ) );
    p.push_back( ps( "gate_size", gs( false, true, true ) ) );
    break;
  case 14:
    p.push_back( ps( "resub", J{ { "max_divisors", 20 } }, 14 ) );
    p.push_back( ps( "fraig", J{ { "sim_words", 8 } }, 14 ) );
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "gate_size", gs( true, false, true ) ) );
    break;
  case 15:
    p.push_back( ps( "refactor", J{ { "max_cone_inputs", 14 } } ) );
    p.push_back( ps( "resub", J{ { "max_divisors", 50 } }, 15 ) );
    p.push_back( ps( "rewrite", J{ { "cut_size", 4 }, { "zero_gain", false } }, 15 ) );
    p.push_back( ps( "gate_size", gs( true, true, false ) ) );
    break;
  case 16:
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "fraig", J{ { "sim_words", 4 } }, 16 ) );
    p.push_back( ps( "refactor", J{ { "max_cone_inputs", 10 } } ) );
    p.push_back( ps( "rewrite", J{ { "cut_size", 4 } }, 16 ) );
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "gate_size", gs( true, true, true ) ) );
    break;
  case 17:
    p.push_back( ps( "gate_size", gs( false, false, true ) ) );
    p.push_back( ps( "strash" ) );
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "resub", J{ { "max_divisors", 40 } }, 17 ) );
    p.push_back( ps( "gate_size", gs( false, true, false ) ) );
    break;
  case 18:
    p.push_back( ps( "rewrite", J{ { "cut_size", 4 } }, 18 ) );
    p.push_back( ps( "refactor", J{ { "max_cone_inputs", 10 } } ) );
    p.push_back( ps( "resub", J{ { "max_divisors", 50 } }, 18 ) );
    p.push_back( ps( "fraig", J{ { "sim_words", 4 } }, 18 ) );
    p.push_back( ps( "balance" ) );
    p.push_back( ps( "rewrite", J{ { "cut_size", 4 } }, 181 ) );
    p.push_back( ps( "gate_size", gs( true, true, true ) ) );
    break;
  default:
    throw RecipeError( "recipe id must be in 1..18" );
  }
  return r;
}

/* --------------------------------------------------------------------
 * Pipeline
 * ------------------------------------------------------------------ */

struct PassReport
{
  std::string pass;
  uint32_t nodes_before = 0, nodes_after = 0;
  uint32_t levels_before = 0, levels_after = 0;
  double wall_ms = 0.0;
  bool equivalence_checked = false;
  std::string check_mode; ///< "exhaustive" or "sampled" when checked
};

inline nlohmann::json to_json( PassReport const& r, bool with_time = true )
{
  nlohmann::json j{ { "pass", r.pass },
                    { "nodes_before", r.nodes_before },
                    { "nodes_after", r.nodes_after },
                    { "levels_before", r.levels_before },
                    { "levels_after", r.levels_after },
                    { "equivalence_checked", r.equivalence_checked } };
  if ( r.equivalence_checked )
    j["check_mode"] = r.check_mode;
  if ( with_time )
    j["wall_ms"] = r.wall_ms;
  return j;
}

struct ApplyOptions
{
  EquivConfig check;
  /// Check equivalence after every pass instead of once at the end.
  bool check_each_pass = false;
};

namespace detail
{

template<typename T>
T param( nlohmann::json const& p, char const* key, T fallback )
{
  if ( !p.contains( key ) )
    return fallback;
  try
  {
    return p.at( key ).get<T>();
  }
  catch ( nlohmann::json::exception const& )
  {
    throw RecipeError( std::string( "bad value for parameter '" ) + key + "'" );
  }
}

inline FromAigOptions gate_size_options( nlohmann::json const& p )
{
  FromAigOptions o;
  o.group_and = param( p, "group_and", false );
  o.detect_xor = param( p, "detect_xor", false );
  o.inverting_gates = param( p, "inverting_gates", false );
  return o;
}

/// Applies one AIG-level pass; gate_size is handled by the caller.
inline AigGraph run_pass( AigGraph const& g, PassSpec const& s, uint64_t seed )
{
  auto const& p = s.params;
  if ( s.pass == "strash" )
    return strash( g );
  if ( s.pass == "balance" )
    return balance( g );
  if ( s.pass == "rewrite" )
  {
    RewriteParams rp;
    rp.cut_size = param( p, "cut_size", rp.cut_size );
    if ( rp.cut_size < 2 || rp.cut_size > 6 )
      throw RecipeError( "rewrite cut_size must be in 2..6" );
    rp.max_cuts = param( p, "max_cuts", rp.max_cuts );
    rp.zero_gain = param( p, "zero_gain", rp.zero_gain );
    rp.seed = seed | 1u;
    return rewrite( g, rp );
  }
  if ( s.pass == "refactor" )
  {
    RefactorParams rp;
    rp.max_cone_inputs = param( p, "max_cone_inputs", rp.max_cone_inputs );
    rp.zero_gain = param( p, "zero_gain", rp.zero_gain );
    return refactor( g, rp );
  }
  if ( s.pass == "resub" )
  {
    ResubParams rp;
    rp.max_divisors = param( p, "max_divisors", rp.max_divisors );
    rp.cut_size = param( p, "cut_size", rp.cut_size );
    rp.sim_words = param( p, "sim_words", rp.sim_words );
    rp.seed = seed;
    return resubstitute( g, rp );
  }
  if ( s.pass == "fraig" )
  {
    FraigParams fp;
    fp.sim_words = param( p, "sim_words", fp.sim_words );
    fp.exact_budget = param( p, "exact_budget", fp.exact_budget );
    fp.seed = seed;
    return fraig( g, fp );
  }
  throw RecipeError( "unknown pass '" + s.pass + "'" );
}

struct PipelineResult
{
  Netlist netlist;
  std::vector<PassReport> reports;
  std::vector<Netlist> snapshots; ///< netlist after each pass (only when requested)
};

inline PipelineResult run_pipeline( Netlist const& n, Recipe const& r, uint64_t seed, bool keep_snapshots )
{
  PipelineResult out;
  AigGraph g = to_aig( n );
  FromAigOptions write_opts;
  for ( std::size_t k = 0; k < r.passes.size(); ++k )
  {
    auto const& s = r.passes[k];
    PassReport rep;
    rep.pass = s.pass;
    rep.nodes_before = g.num_ands();
    rep.levels_before = g.depth();
    auto const t0 = std::chrono::steady_clock::now();
    if ( s.pass == "gate_size" )
    {
      write_opts = gate_size_options( s.params );
      if ( k + 1 < r.passes.size() )
        g = strash( to_aig( from_aig( g, write_opts ) ) );
    }
    else
      g = run_pass( g, s, derive_seed( seed ^ s.seed, k ) );
    rep.wall_ms = std::chrono::duration<double, std::milli>( std::chrono::steady_clock::now() - t0 ).count();
    rep.nodes_after = g.num_ands();
    rep.levels_after = g.depth();
    out.reports.push_back( std::move( rep ) );
    if ( keep_snapshots )
      out.snapshots.push_back( from_aig( g, write_opts ) );
  }
  out.netlist = from_aig( g, write_opts );
  out.netlist.name = n.name;
  return out;
}

} // namespace detail

/* Runs the recipe and checks the result against the input.  On a failed
 * check the pipeline is replayed pass by pass to name the culprit. */
inline std::pair<Netlist, std::vector<PassReport>> apply_recipe( Netlist const& n, Recipe const& r, uint64_t seed,
                                                                 ApplyOptions const& opt = {} )
{
  validate_recipe( r );
  require_valid( n );
  auto res = detail::run_pipeline( n, r, seed, opt.check_each_pass );

  auto check = [&]( Netlist const& m ) {
    auto cfg = opt.check;
    cfg.seed = derive_seed( seed, 0x5eed );
    return check_equivalence( n, m, cfg );
  };
  auto locate_failure = [&]() {
    auto const replay = opt.check_each_pass ? res : detail::run_pipeline( n, r, seed, true );
    for ( std::size_t k = 0; k < replay.snapshots.size(); ++k )
      if ( check( replay.snapshots[k] ).refuted() )
        throw EquivalenceFailure( r.passes[k].pass, k );
    throw EquivalenceFailure( "output", r.passes.size() );
  };

  if ( opt.check_each_pass )
  {
    for ( std::size_t k = 0; k < res.snapshots.size(); ++k )
    {
      auto const v = check( res.snapshots[k] );
      if ( v.refuted() )
        throw EquivalenceFailure( r.passes[k].pass, k );
      res.reports[k].equivalence_checked = true;
      res.reports[k].check_mode = to_string( v.mode );
    }
  }
  auto const v = check( res.netlist );
  if ( v.refuted() )
    locate_failure();
  res.reports.back().equivalence_checked = true;
  res.reports.back().check_mode = to_string( v.mode );
  return { std::move( res.netlist ), std::move( res.reports ) };
}

inline std::pair<Netlist, std::vector<PassReport>> apply_recipe( Netlist const& n, int builtin_id, uint64_t seed,
                                                                 ApplyOptions const& opt = {} )
{
  return apply_recipe( n, builtin_recipe( builtin_id ), seed, opt );
}

} // namespace forge
