#include "oracles.hpp"

#include <forge/aig.hpp>
#include <forge/analytics.hpp>
#include <forge/generate.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace forge;

namespace
{

/// Counts trigger sets by walking every subset of every strategy's nets.
uint64_t brute_space( StrategyProfile const& p )
{
  uint64_t total = 0;
  for ( auto const& [r, g] : p.nets )
  {
    auto const n = r + g;
    for ( uint64_t mask = 0; mask < ( uint64_t{ 1 } << n ); ++mask )
    {
      auto const q = static_cast<uint32_t>( std::popcount( mask ) );
      total += q >= 2 && q <= p.max_width;
    }
  }
  return total;
}

/// Mean L over all hider placements and seeker orders.
double brute_game( int n, int k )
{
  std::vector<int> perm( n );
  std::iota( perm.begin(), perm.end(), 0 );
  double sum = 0;
  uint64_t count = 0;
  do
    for ( uint32_t mask = 0; mask < ( 1u << n ); ++mask )
    {
      if ( std::popcount( mask ) != k )
        continue;
      int found = 0, L = 0;
      for ( int i = 0; i < n && found < k; ++i )
      {
        ++L;
        found += ( mask >> perm[i] ) & 1;
      }
      sum += L;
      ++count;
    }
  while ( std::next_permutation( perm.begin(), perm.end() ) );
  return sum / static_cast<double>( count );
}

double dot( std::vector<double> const& a, std::vector<double> const& b )
{
  double s = 0;
  for ( std::size_t i = 0; i < a.size(); ++i )
    s += a[i] * b[i];
  return s;
}

Matrix rank2_rows( uint64_t seed, std::size_t count = 60 )
{
  Rng rng( seed );
  std::vector<double> u( feature_dim ), w( feature_dim ), base( feature_dim );
  for ( std::size_t j = 0; j < feature_dim; ++j )
  {
    u[j] = rng.uniform() - 0.5;
    w[j] = rng.uniform() - 0.5;
    base[j] = 10 * rng.uniform();
  }
  Matrix rows;
  for ( std::size_t i = 0; i < count; ++i )
  {
    double const a = 4 * ( rng.uniform() - 0.5 ), b = rng.uniform() - 0.5;
    std::vector<double> r( feature_dim );
    for ( std::size_t j = 0; j < feature_dim; ++j )
      r[j] = base[j] + a * u[j] + b * w[j];
    rows.push_back( r );
  }
  return rows;
}

} // namespace

TEST( features, full_adder_counts )
{
  auto const f = extract_features( full_adder() );
  auto idx = []( GateKind k ) { return static_cast<std::size_t>( k ); };
  EXPECT_EQ( f[idx( GateKind::and_ )], 2 );
  EXPECT_EQ( f[idx( GateKind::xor_ )], 2 );
  EXPECT_EQ( f[idx( GateKind::or_ )], 1 );
  EXPECT_EQ( f[16], 3 );
  EXPECT_EQ( f[17], 2 );
  EXPECT_EQ( f[19], 5 );
  EXPECT_DOUBLE_EQ( f[31], 0.4 );
  EXPECT_EQ( feature_names().size(), feature_dim );
}

TEST( features, buffer_passthrough )
{
  Netlist n( "pass" );
  n.add_input( "a" );
  n.add_input( "b" );
  n.add_gate( GateKind::buf, { n.net( "a" ) }, "y" );
  n.add_gate( GateKind::buf, { n.net( "b" ) }, "z" );
  n.add_output( "y" );
  n.add_output( "z" );
  auto const f = extract_features( n );
  EXPECT_EQ( f[20], 1 );
  EXPECT_EQ( f[21], 1 );
  for ( std::size_t k = 1; k < 8; ++k )
    EXPECT_EQ( f[k], 0 );
  EXPECT_EQ( f[0], 2 );
}

TEST( features, deterministic_finite_and_interface_stable )
{
  for ( uint64_t seed = 1; seed <= 8; ++seed )
  {
    RandomNetlistOptions o;
    o.num_inputs = seed % 2 ? 10 : 20;
    o.num_gates = 80;
    auto const n = random_netlist( o, seed );
    auto const f = extract_features( n );
    EXPECT_EQ( f, extract_features( n ) );
    for ( auto x : f )
      EXPECT_TRUE( std::isfinite( x ) );
    auto const s = extract_features( from_aig( strash( to_aig( n ) ) ) );
    EXPECT_EQ( s[16], f[16] );
    EXPECT_EQ( s[17], f[17] );
  }
}

TEST( pca, collinear_points )
{
  auto const m = pca_fit( { { 0, 0 }, { 1, 1 }, { 2, 2 } }, 2 );
  EXPECT_NEAR( m.components[0][0], 1 / std::sqrt( 2.0 ), 1e-12 );
  EXPECT_NEAR( m.components[0][1], 1 / std::sqrt( 2.0 ), 1e-12 );
  EXPECT_NEAR( m.explained_variance[0], 2.0, 1e-12 );
  EXPECT_NEAR( m.explained_variance[1], 0.0, 1e-12 );
}

TEST( pca, two_by_two_matches_closed_form )
{
  Rng rng( 9 );
  for ( int trial = 0; trial < 50; ++trial )
  {
    Matrix rows;
    for ( int i = 0; i < 20; ++i )
    {
      double const x = rng.uniform(), y = rng.uniform();
      rows.push_back( { x, 0.3 * x + y * ( trial % 5 ) } );
    }
    /* covariance by hand, eigenvalues from the characteristic polynomial */
    double mx = 0, my = 0;
    for ( auto const& r : rows )
      mx += r[0], my += r[1];
    mx /= 20, my /= 20;
    double a = 0, b = 0, c = 0;
    for ( auto const& r : rows )
    {
      a += ( r[0] - mx ) * ( r[0] - mx );
      b += ( r[0] - mx ) * ( r[1] - my );
      c += ( r[1] - my ) * ( r[1] - my );
    }
    a /= 19, b /= 19, c /= 19;
    double const tr = a + c, disc = std::sqrt( ( a - c ) * ( a - c ) + 4 * b * b );
    double const l1 = ( tr + disc ) / 2, l2 = ( tr - disc ) / 2;
    auto const m = pca_fit( rows, 2 );
    EXPECT_NEAR( m.explained_variance[0], l1, 1e-10 );
    EXPECT_NEAR( m.explained_variance[1], std::max( 0.0, l2 ), 1e-10 );
    /* eigenvector check: (C - l1 I) v = 0 */
    auto const& v = m.components[0];
    EXPECT_NEAR( ( a - l1 ) * v[0] + b * v[1], 0.0, 1e-9 );
    EXPECT_NEAR( b * v[0] + ( c - l1 ) * v[1], 0.0, 1e-9 );
  }
}

TEST( pca, isotropic_data_ties )
{
  auto const m = pca_fit( { { 1, 0 }, { -1, 0 }, { 0, 1 }, { 0, -1 } }, 2 );
  EXPECT_NEAR( m.explained_variance[0], m.explained_variance[1], 1e-12 );
  EXPECT_NEAR( m.components[0][0], 1.0, 1e-12 );
  EXPECT_NEAR( m.components[1][1], 1.0, 1e-12 );
}

TEST( pca, rank_two_properties )
{
  auto const rows = rank2_rows( 3 );
  auto const m = pca_fit( rows, feature_dim );
  for ( std::size_t c = 2; c < feature_dim; ++c )
    EXPECT_LT( m.explained_variance[c], 1e-9 );
  for ( std::size_t c = 1; c < feature_dim; ++c )
    EXPECT_LE( m.explained_variance[c], m.explained_variance[c - 1] );
  for ( std::size_t a = 0; a < feature_dim; ++a )
  {
    EXPECT_GT( m.components[a][detail::argmax_abs( m.components[a] )], 0 );
    for ( std::size_t b = 0; b < feature_dim; ++b )
      EXPECT_NEAR( dot( m.components[a], m.components[b] ), a == b ? 1.0 : 0.0, 1e-9 );
  }
  auto const y = pca_project( m, rows );
  auto const back = pca_reconstruct( m, y );
  for ( std::size_t i = 0; i < rows.size(); ++i )
    for ( std::size_t j = 0; j < feature_dim; ++j )
      EXPECT_NEAR( back[i][j], rows[i][j], 1e-8 );
  for ( std::size_t a = 0; a < 4; ++a )
    for ( std::size_t b = 0; b < 4; ++b )
    {
      double s = 0;
      for ( auto const& r : y )
        s += r[a] * r[b];
      s /= static_cast<double>( y.size() - 1 );
      EXPECT_NEAR( s, a == b ? m.explained_variance[a] : 0.0, 1e-8 );
    }
}

TEST( pca, projection_examples_and_errors )
{
  auto const rows = rank2_rows( 8, 10 );
  auto const m = pca_fit( rows, 3 );
  auto const at_mean = pca_project( m, { m.mean } )[0];
  for ( auto x : at_mean )
    EXPECT_NEAR( x, 0.0, 1e-12 );
  auto p = m.mean;
  for ( std::size_t j = 0; j < p.size(); ++j )
    p[j] += 2 * m.components[0][j];
  auto const y = pca_project( m, { p } )[0];
  EXPECT_NEAR( y[0], 2.0, 1e-12 );
  EXPECT_NEAR( y[1], 0.0, 1e-12 );
  EXPECT_THROW( pca_project( m, { { 1.0, 2.0 } } ), std::invalid_argument );
  EXPECT_THROW( pca_fit( { rows[0] }, 1 ), std::invalid_argument );
  EXPECT_THROW( pca_fit( rows, 10 ), std::invalid_argument );

  auto const flat = pca_fit( { { 1, 2 }, { 1, 2 }, { 1, 2 } }, 2 );
  EXPECT_FALSE( flat.warning.empty() );
  EXPECT_EQ( flat.explained_variance, ( std::vector<double>{ 0, 0 } ) );
}

TEST( pca, svg_markers )
{
  auto const svg = scatter_svg( { { 0, 0, 1, 1 }, { 1, 1, 0, 0 } }, { 1, 0 } );
  EXPECT_NE( svg.find( "PC3" ), std::string::npos );
  EXPECT_NE( svg.find( ">+<" ), std::string::npos );
  EXPECT_NE( svg.find( ">-<" ), std::string::npos );
}

TEST( space, examples )
{
  EXPECT_EQ( ht_space_size( { { { 3, 2 } }, 2 } ), 10 );
  EXPECT_EQ( ht_space_size( { { { 3, 2 } }, 3 } ), 20 );
  EXPECT_EQ( ht_space_size( { { { 0, 0 } }, 5 } ), 0 );
  EXPECT_THROW( ht_space_size( { { { 1, 1 } }, 1 } ), std::invalid_argument );
  /* grows past 64 bits */
  auto const big = ht_space_size( { { { 200, 300 } }, 12 } );
  EXPECT_GT( big, BigInt( std::numeric_limits<uint64_t>::max() ) );
}

TEST( space, matches_enumeration_and_vandermonde )
{
  for ( uint64_t r = 0; r <= 12; ++r )
    for ( uint64_t g = 0; r + g <= 12; ++g )
    {
      for ( uint32_t M = 2; M <= 5; ++M )
        EXPECT_EQ( ht_space_size( { { { r, g } }, M } ), brute_space( { { { r, g } }, M } ) );
      for ( uint32_t q = 0; q <= r + g; ++q )
      {
        BigInt s = 0;
        for ( uint32_t p = 0; p <= q; ++p )
          s += binomial( r, p ) * binomial( g, q - p );
        EXPECT_EQ( s, binomial( r + g, q ) );
      }
    }
  StrategyProfile three{ { { 2, 5 }, { 4, 1 }, { 0, 7 } }, 4 };
  EXPECT_EQ( ht_space_size( three ), brute_space( three ) );
}

TEST( game, examples )
{
  auto const zero = seek_simulate( 10, 0, HiderStrategy::uniform, SeekerStrategy::uniform, 50, 1, 25 );
  EXPECT_EQ( zero.histogram.size(), 1u );
  EXPECT_EQ( zero.histogram.at( 25 ), 50u );
  auto const all = seek_simulate( 10, 10, HiderStrategy::uniform, SeekerStrategy::uniform, 50, 1, 100 );
  EXPECT_EQ( all.histogram.at( 10 ), 50u );
  auto const capped = seek_simulate( 10, 10, HiderStrategy::uniform, SeekerStrategy::uniform, 5, 1, 4 );
  EXPECT_EQ( capped.histogram.at( 4 ), 5u );
  EXPECT_THROW( seek_simulate( 3, 4, HiderStrategy::uniform, SeekerStrategy::uniform, 1, 1, 10 ), std::invalid_argument );
  EXPECT_THROW( seek_simulate( 3, 1, HiderStrategy::uniform, SeekerStrategy::uniform, 1, 1, 0 ), std::invalid_argument );
  auto const a = seek_simulate( 30, 3, HiderStrategy::uniform, SeekerStrategy::uniform, 200, 7, 100 );
  auto const b = seek_simulate( 30, 3, HiderStrategy::uniform, SeekerStrategy::uniform, 200, 7, 100 );
  EXPECT_EQ( a.histogram, b.histogram );
}

TEST( game, expectation_matches_brute_force_and_simulation )
{
  for ( int n = 1; n <= 6; ++n )
    for ( int k = 1; k <= n; ++k )
      EXPECT_NEAR( expected_game_length( n, k ), brute_game( n, k ), 1e-12 ) << n << " " << k;
  for ( auto s : { SeekerStrategy::uniform, SeekerStrategy::sequential } )
    for ( uint64_t k : { 1, 2, 5 } )
    {
      auto const r = seek_simulate( 40, k, HiderStrategy::uniform, s, 20000, 11 + k, 1000 );
      EXPECT_NEAR( r.mean, expected_game_length( 40, k ), 3 * r.stderr_mean ) << k;
    }
}
