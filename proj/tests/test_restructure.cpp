#include "oracles.hpp"

#include <forge/equiv.hpp>
#include <forge/generate.hpp>
#include <forge/justify.hpp>
#include <forge/recipe.hpp>
#include <forge/restructure.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace forge;

namespace
{

AigGraph with_pis( uint32_t n )
{
  AigGraph g( "t" );
  for ( uint32_t k = 0; k < n; ++k )
    g.create_pi( "x" + std::to_string( k ) );
  return g;
}

void expect_equivalent( AigGraph const& a, AigGraph const& b )
{
  ASSERT_EQ( a.num_pis(), b.num_pis() );
  ASSERT_EQ( a.po_names(), b.po_names() );
  EXPECT_EQ( oracle::truth_table( a ), oracle::truth_table( b ) );
}

AigGraph random_aig( uint64_t seed, uint32_t pis = 8, uint32_t gates = 40 )
{
  RandomNetlistOptions o;
  o.num_inputs = pis;
  o.num_gates = gates;
  o.num_outputs = 3;
  return strash( to_aig( random_netlist( o, seed ) ) );
}

bool satisfies( AigGraph const& g, std::vector<AigEdge> const& targets, std::vector<uint8_t> const& v )
{
  uint64_t row = 0;
  for ( std::size_t k = 0; k < v.size(); ++k )
    row |= uint64_t{ v[k] } << k;
  for ( auto t : targets )
    if ( !oracle::aig_value( g, t, row ) )
      return false;
  return true;
}

} // namespace

/* ---------------------------------------------------------------- justify */

TEST( justify, contradiction_is_unsatisfiable )
{
  auto g = with_pis( 2 );
  auto const a = g.pi( 0 );
  std::vector<AigEdge> t{ a, !a };
  EXPECT_EQ( justify( g, t ).status, SearchStatus::unsatisfiable );
  auto const n = g.create_and( a, !a );
  std::vector<AigEdge> t2{ n };
  EXPECT_EQ( justify( g, t2 ).status, SearchStatus::unsatisfiable );
}

TEST( justify, wide_and_needs_all_ones )
{
  auto g = with_pis( 8 );
  AigBuilder b( g );
  std::vector<AigEdge> ops;
  for ( uint32_t k = 0; k < 8; ++k )
    ops.push_back( g.pi( k ) );
  std::vector<AigEdge> t{ b.land_balanced( ops ) };
  auto const r = justify( g, t );
  ASSERT_EQ( r.status, SearchStatus::satisfiable );
  EXPECT_EQ( r.pi_values, std::vector<uint8_t>( 8, 1 ) );
}

TEST( justify, agrees_with_exhaustive_search )
{
  for ( uint64_t seed = 1; seed <= 40; ++seed )
  {
    auto const g = random_aig( seed, 7, 30 );
    Rng rng( seed );
    std::vector<AigEdge> t;
    for ( int k = 0; k < 2; ++k )
      t.push_back( g.po( static_cast<uint32_t>( rng.below( g.num_pos() ) ) ) ^ rng.bernoulli( 0.5 ) );
    bool any = false;
    for ( uint64_t row = 0; row < 128 && !any; ++row )
      any = oracle::aig_value( g, t[0], row ) && oracle::aig_value( g, t[1], row );
    auto const r = justify( g, t );
    if ( any )
    {
      ASSERT_EQ( r.status, SearchStatus::satisfiable ) << seed;
      EXPECT_TRUE( satisfies( g, t, r.pi_values ) );
    }
    else
      EXPECT_EQ( r.status, SearchStatus::unsatisfiable ) << seed;
  }
}

/* ---------------------------------------------------------------- balance */

TEST( balance, and_chain_depth_seven_to_three )
{
  auto g = with_pis( 8 );
  auto acc = g.pi( 0 );
  for ( uint32_t k = 1; k < 8; ++k )
    acc = g.create_and( acc, g.pi( k ) );
  g.create_po( acc, "y" );
  ASSERT_EQ( g.depth(), 7u );
  auto const b = balance( g );
  EXPECT_EQ( b.depth(), 3u );
  EXPECT_EQ( b.num_ands(), 7u );
  expect_equivalent( g, b );
}

TEST( balance, fixed_point_and_single_node )
{
  auto g = with_pis( 2 );
  g.create_po( g.create_and( g.pi( 0 ), g.pi( 1 ) ), "y" );
  auto const b = balance( g );
  EXPECT_EQ( b, g );
  auto const bb = balance( balance( strash( to_aig( c17() ) ) ) );
  EXPECT_EQ( bb.depth(), balance( strash( to_aig( c17() ) ) ).depth() );
}

/* ---------------------------------------------------------------- rewrite */

TEST( rewrite, absorption_removes_node )
{
  auto g = with_pis( 2 );
  auto const ab = g.create_and( g.pi( 0 ), g.pi( 1 ) );
  g.create_po( g.create_and( g.pi( 0 ), ab ), "y" );
  auto const r = rewrite( g );
  EXPECT_EQ( r.num_ands(), 1u );
  expect_equivalent( g, r );
}

TEST( rewrite, duplicate_or_builds_share_structure )
{
  auto g = with_pis( 2 );
  auto const a = g.pi( 0 ), b = g.pi( 1 );
  auto const o1 = !g.create_and( !a, !b );
  auto const o2 = !g.create_and( !b, !a );
  g.create_po( o1, "y0" );
  g.create_po( o2, "y1" );
  auto const r = rewrite( g );
  EXPECT_EQ( r.num_ands(), 1u );
  EXPECT_EQ( r.po( 0 ), r.po( 1 ) );
  expect_equivalent( g, r );
}

TEST( rewrite, xor_stays_at_three_nodes )
{
  auto g = with_pis( 2 );
  AigBuilder b( g );
  g.create_po( b.lxor( g.pi( 0 ), g.pi( 1 ) ), "y" );
  auto const r = rewrite( g );
  EXPECT_EQ( r.num_ands(), 3u );
  expect_equivalent( g, r );
}

/* --------------------------------------------------------------- refactor */

TEST( refactor, factors_common_literal )
{
  auto g = with_pis( 3 );
  auto const a = g.pi( 0 ), b = g.pi( 1 ), c = g.pi( 2 );
  auto const ab = g.create_and( a, b ), ac = g.create_and( a, c );
  g.create_po( !g.create_and( !ab, !ac ), "y" );
  ASSERT_EQ( g.num_ands(), 3u );
  auto const r = refactor( g, 10 );
  EXPECT_EQ( r.num_ands(), 2u );
  expect_equivalent( g, r );
}

TEST( refactor, constant_cone_and_width_bound )
{
  auto g = with_pis( 2 );
  auto const a = g.pi( 0 ), b = g.pi( 1 );
  auto const x = g.create_and( a, b );
  auto const y = g.create_and( !a, b );
  g.create_po( g.create_and( x, y ), "z" );
  auto const r = refactor( g, 10 );
  EXPECT_EQ( r.num_ands(), 0u );
  EXPECT_EQ( r.po( 0 ), aig_false );
  EXPECT_THROW( refactor( g, 17 ), std::invalid_argument );
  auto const c = strash( to_aig( c17() ) );
  EXPECT_LE( refactor( c, 10 ).num_ands(), c.num_ands() );
}

/* ------------------------------------------------------------------ resub */

TEST( resub, reuses_existing_divisor )
{
  auto g = with_pis( 3 );
  auto const a = g.pi( 0 ), b = g.pi( 1 ), c = g.pi( 2 );
  auto const d = g.create_and( a, b );
  auto const bc = g.create_and( b, c );
  auto const f = g.create_and( a, bc );
  g.create_po( d, "d" );
  g.create_po( f, "f" );
  ASSERT_EQ( g.num_ands(), 3u );
  auto const r = resubstitute( g, 50 );
  EXPECT_EQ( r.num_ands(), 2u );
  expect_equivalent( g, r );
}

TEST( resub, alias_and_no_divisors )
{
  auto g = with_pis( 3 );
  auto const a = g.pi( 0 ), b = g.pi( 1 ), c = g.pi( 2 );
  auto const x = g.create_and( a, g.create_and( b, c ) );
  auto const y = g.create_and( c, g.create_and( a, b ) );
  g.create_po( x, "x" );
  g.create_po( y, "y" );
  auto const r = resubstitute( g, 50 );
  EXPECT_EQ( r.num_ands(), 2u );
  expect_equivalent( g, r );

  auto h = with_pis( 2 );
  h.create_po( h.create_and( h.pi( 0 ), h.pi( 1 ) ), "y" );
  EXPECT_EQ( resubstitute( h, 50 ), h );
}

/* ------------------------------------------------------------------ fraig */

TEST( fraig, merges_xor_builds_and_complements )
{
  auto g = with_pis( 2 );
  auto const a = g.pi( 0 ), b = g.pi( 1 );
  /* xor as (a|b)&!(a&b) and as !(!(a&!b) & !(!a&b)) */
  auto const x1 = g.create_and( !g.create_and( !a, !b ), !g.create_and( a, b ) );
  auto const x2 = !g.create_and( !g.create_and( a, !b ), !g.create_and( !a, b ) );
  g.create_po( x1, "p" );
  g.create_po( !x2, "q" );
  auto const f = fraig( g, 2, 7, 100 );
  EXPECT_LT( f.num_ands(), g.num_ands() );
  EXPECT_EQ( f.po( 0 ), !f.po( 1 ) );
  expect_equivalent( g, f );
}

TEST( fraig, distinct_functions_unchanged )
{
  auto g = with_pis( 3 );
  auto const a = g.pi( 0 ), b = g.pi( 1 ), c = g.pi( 2 );
  g.create_po( g.create_and( a, b ), "x" );
  g.create_po( g.create_and( b, c ), "y" );
  g.create_po( g.create_and( a, c ), "z" );
  EXPECT_EQ( fraig( g, 4, 1, 100 ), g );
}

TEST( fraig, prove_pair_by_search_beyond_support_bound )
{
  auto g = with_pis( 24 );
  AigBuilder b( g );
  std::vector<AigEdge> ops;
  for ( uint32_t k = 0; k < 24; ++k )
    ops.push_back( g.pi( k ) );
  auto const x = b.land_balanced( ops );
  auto y = ops[0];
  for ( uint32_t k = 1; k < 24; ++k )
    y = g.create_and( y, ops[k] );
  EXPECT_EQ( prove_pair( g, x.index(), y.index(), false, 10000 ), PairVerdict::equivalent );
  EXPECT_EQ( prove_pair( g, x.index(), ops[3].index(), false, 10000 ), PairVerdict::different );
}

/* ------------------------------------------------------ pass properties */

TEST( passes, equivalence_and_monotonicity_on_random_graphs )
{
  for ( uint64_t seed = 1; seed <= 25; ++seed )
  {
    auto const g = random_aig( seed, 9, 60 );
    auto const b = balance( g );
    EXPECT_LE( b.depth(), g.depth() );
    expect_equivalent( g, b );
    for ( auto const& r : { rewrite( g, RewriteParams{ 4, 8, true, seed } ), refactor( g, 10 ), resubstitute( g, 50 ),
                            fraig( g, 4, seed, 1000 ) } )
    {
      EXPECT_LE( r.num_ands(), g.num_ands() );
      expect_equivalent( g, r );
    }
  }
}

/* ----------------------------------------------------------------- equiv */

TEST( equiv, self_miter_is_constant_zero )
{
  auto const n = random_netlist( {}, 3 );
  auto const m = build_miter( n, n );
  EXPECT_EQ( m.netlist.gates.size(), 2 * n.gates.size() + n.outputs.size() + n.outputs.size() - 1 );
  EXPECT_TRUE( validate( m.netlist ).empty() );
  for ( auto const& row : oracle::truth_table( m.netlist ) )
    EXPECT_EQ( row, "0" );
}

TEST( equiv, gate_swap_is_detected_with_genuine_counterexample )
{
  auto const a = full_adder();
  auto b = a;
  for ( auto& gate : b.gates )
    if ( gate.kind == GateKind::and_ )
    {
      gate.kind = GateKind::or_;
      break;
    }
  auto const m = build_miter( a, b );
  auto const rows = oracle::truth_table( m.netlist );
  EXPECT_NE( std::count( rows.begin(), rows.end(), "1" ), 0 );
  auto const v = check_equivalence( a, b );
  ASSERT_TRUE( v.refuted() );
  EXPECT_EQ( v.mode, EquivMode::exhaustive );
  auto const ra = simulate( a, *v.counterexample ), rb = simulate( b, *v.counterexample );
  EXPECT_TRUE( ra.at( "sum" ) != rb.at( "sum" ) || ra.at( "cout" ) != rb.at( "cout" ) );
}

TEST( equiv, interface_mismatch_names_ports )
{
  auto const a = full_adder();
  auto b = a;
  b.rename_net( b.inputs[0], "x" );
  try
  {
    build_miter( a, b );
    FAIL();
  }
  catch ( InterfaceMismatch const& e )
  {
    ASSERT_EQ( e.ports().size(), 1u );
    EXPECT_NE( e.ports()[0].find( "x" ), std::string::npos );
  }
}

TEST( equiv, agrees_with_truth_tables_on_random_pairs )
{
  int equal = 0;
  for ( uint64_t seed = 1; seed <= 100; ++seed )
  {
    RandomNetlistOptions o;
    o.num_inputs = 5;
    o.num_gates = 12;
    o.num_outputs = 2;
    auto const a = random_netlist( o, seed );
    auto b = seed % 3 == 0 ? from_aig( strash( to_aig( a ) ), { true, true, true } ) : random_netlist( o, seed + 1000 );
    b.name = a.name;
    auto const same = oracle::truth_table( a ) == oracle::truth_table( b );
    equal += same;
    auto const v = check_equivalence( a, b );
    EXPECT_EQ( v.equivalent(), same ) << seed;
    EXPECT_EQ( v.refuted(), !same ) << seed;
  }
  EXPECT_GT( equal, 20 );
}

TEST( equiv, sampled_and_search_modes )
{
  RandomNetlistOptions o;
  o.num_inputs = 32;
  o.num_gates = 80;
  auto const a = random_netlist( o, 9 );
  auto const b = from_aig( balance( strash( to_aig( a ) ) ) );
  EquivConfig cfg;
  auto v = check_equivalence( a, b, cfg );
  EXPECT_EQ( v.mode, EquivMode::sampled );
  EXPECT_EQ( v.result, EquivResult::no_mismatch_found );
  EXPECT_EQ( v.vectors, 100000u );

  /* a 32-input AND chain against its balanced form is proven by search */
  Netlist chain( "w" );
  std::vector<NetId> in;
  for ( int k = 0; k < 32; ++k )
    in.push_back( chain.add_input( "i" + std::to_string( k ) ) );
  chain.add_gate( GateKind::and_, in, "y" );
  chain.add_output( "y" );
  auto const tree = from_aig( balance( strash( to_aig( chain ) ) ) );
  cfg.search_budget = 100000;
  v = check_equivalence( chain, tree, cfg );
  EXPECT_EQ( v.mode, EquivMode::search );
  EXPECT_TRUE( v.equivalent() );

  /* a one-minterm difference escapes sampling but not the search */
  Netlist broken( "w" );
  in.clear();
  for ( int k = 0; k < 32; ++k )
    in.push_back( broken.add_input( "i" + std::to_string( k ) ) );
  broken.add_gate( GateKind::not_, { in[31] }, "n31" );
  in[31] = broken.net( "n31" );
  broken.add_gate( GateKind::and_, in, "y" );
  broken.add_output( "y" );
  cfg.vectors = 1000;
  v = check_equivalence( chain, broken, cfg );
  EXPECT_TRUE( v.refuted() );
}

/* ---------------------------------------------------------------- recipes */

TEST( recipes, builtins_are_well_formed_and_round_trip_json )
{
  for ( int id = 1; id <= num_builtin_recipes; ++id )
  {
    auto const r = builtin_recipe( id );
    EXPECT_NO_THROW( validate_recipe( r ) );
    auto const back = recipe_from_json( recipe_to_json( r ) );
    EXPECT_EQ( recipe_to_json( back ), recipe_to_json( r ) );
  }
  EXPECT_THROW( builtin_recipe( 19 ), RecipeError );
  EXPECT_THROW( recipe_from_json( nlohmann::json::parse( R"([{"pass":"balance"}])" ) ), RecipeError );
  EXPECT_THROW( recipe_from_json( nlohmann::json::parse( R"([{"pass":"strash"},{"pass":"map"}])" ) ), RecipeError );
}

TEST( recipes, full_adder_recipe_one )
{
  auto const n = full_adder();
  auto const [out, reports] = apply_recipe( n, 1, 0 );
  EXPECT_EQ( oracle::truth_table( out ), oracle::truth_table( n ) );
  ASSERT_EQ( reports.size(), 2u );
  EXPECT_TRUE( reports.back().equivalence_checked );
  EXPECT_EQ( reports.back().check_mode, "exhaustive" );
  EXPECT_LE( strash( to_aig( out ) ).depth(), strash( to_aig( n ) ).depth() );
}

TEST( recipes, deterministic_output )
{
  auto const n = random_netlist( {}, 11 );
  Recipe r;
  r.passes = { { "strash", {}, 0 } };
  EXPECT_EQ( write_netlist( apply_recipe( n, r, 5 ).first ), write_netlist( apply_recipe( n, r, 5 ).first ) );
  for ( int id = 1; id <= num_builtin_recipes; ++id )
    EXPECT_EQ( write_netlist( apply_recipe( n, id, 3 ).first ), write_netlist( apply_recipe( n, id, 3 ).first ) );
}

TEST( recipes, eighteen_distinct_equivalent_outputs )
{
  RandomNetlistOptions o;
  o.num_inputs = 10;
  o.num_gates = 80;
  o.num_outputs = 4;
  auto const n = random_netlist( o, 2024 );
  auto const golden = oracle::truth_table( n );
  std::set<std::string> texts;
  for ( int id = 1; id <= num_builtin_recipes; ++id )
  {
    auto const [out, reports] = apply_recipe( n, id, 1 );
    EXPECT_EQ( oracle::truth_table( out ), golden ) << id;
    for ( std::size_t k = 0; k < n.inputs.size(); ++k )
      EXPECT_EQ( out.net_name( out.inputs[k] ), n.net_name( n.inputs[k] ) );
    for ( std::size_t k = 0; k < n.outputs.size(); ++k )
      EXPECT_EQ( out.net_name( out.outputs[k] ), n.net_name( n.outputs[k] ) );
    texts.insert( write_netlist( out ) );
  }
  EXPECT_EQ( texts.size(), static_cast<std::size_t>( num_builtin_recipes ) );
}

TEST( recipes, check_each_pass_marks_every_report )
{
  auto const [out, reports] = apply_recipe( c17(), 18, 2, ApplyOptions{ {}, true } );
  for ( auto const& r : reports )
    EXPECT_TRUE( r.equivalence_checked );
}
