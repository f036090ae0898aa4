#pragma once

/*!
  \file analytics.hpp
  \brief Circuit features, PCA, trigger-space counting and the hide-and-seek game
*/

#include "analysis.hpp"
#include "detail/rng.hpp"
#include "netlist.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge
{

/* --------------------------------------------------------------------
 * Feature vectors
 * ------------------------------------------------------------------ */

inline constexpr std::size_t feature_dim = 32;
inline constexpr int feature_version = 1;

using FeatureVector = std::array<double, feature_dim>;

/* Layout (version 1):
 *  0- 7  gate count per kind (buf not and or xor nand nor xnor)
 *  8-15  same, as a fraction of all gates
 * 16-17  PI count, PO count
 * 18-19  net count, gate count
 * 20-21  max / mean PO depth (gate levels)
 * 22-23  max / mean fanout over driven nets
 * 24     fraction of candidate nets with p(1) <= 0.05
 * 25-26  mean / min p(1) over candidate nets
 * 27-29  mean CC0, CC1, CO over nets with finite values
 * 30     AND grouping: share of AND/NAND gates whose only reader is an AND/NAND
 * 31     XOR + XNOR share of gates
 * Probabilities are exact up to 16 PIs, else 65536 vectors at seed 0. */
inline std::vector<std::string> const& feature_names()
{
  static std::vector<std::string> const names = [] {
    std::vector<std::string> v;
    for ( auto k : all_gate_kinds )
      v.push_back( "n_" + std::string( to_string( k ) ) );
    for ( auto k : all_gate_kinds )
      v.push_back( "f_" + std::string( to_string( k ) ) );
    for ( auto s : { "pis", "pos", "nets", "gates", "depth_max", "depth_mean", "fanout_max", "fanout_mean",
                     "rare_frac", "p_mean", "p_min", "cc0_mean", "cc1_mean", "co_mean", "and_grouping", "xor_frac" } )
      v.emplace_back( s );
    return v;
  }();
  return names;
}

inline constexpr std::size_t feature_exact_pi_bound = 16;
inline constexpr uint64_t feature_vectors = 65536;

inline FeatureVector extract_features( Netlist const& n )
{
  require_valid( n );
  FeatureVector f{};
  auto const c = connectivity( n );
  double const gates = static_cast<double>( n.gates.size() );
  for ( auto const& g : n.gates )
    f[static_cast<std::size_t>( g.kind )] += 1;
  for ( std::size_t k = 0; k < 8; ++k )
    f[8 + k] = gates ? f[k] / gates : 0.0;
  f[16] = static_cast<double>( n.inputs.size() );
  f[17] = static_cast<double>( n.outputs.size() );
  f[18] = static_cast<double>( n.num_nets() );
  f[19] = gates;

  auto const level = net_levels( n, c );
  double dsum = 0;
  for ( auto po : n.outputs )
  {
    f[20] = std::max( f[20], static_cast<double>( level[po] ) );
    dsum += level[po];
  }
  f[21] = n.outputs.empty() ? 0.0 : dsum / static_cast<double>( n.outputs.size() );

  std::size_t driven = 0, fsum = 0;
  for ( NetId id = 0; id < n.num_nets(); ++id )
    if ( c.driver[id] >= 0 || c.driver[id] == driver_input )
    {
      ++driven;
      fsum += c.fanout[id].size();
      f[22] = std::max( f[22], static_cast<double>( c.fanout[id].size() ) );
    }
  f[23] = driven ? static_cast<double>( fsum ) / static_cast<double>( driven ) : 0.0;

  auto const st = n.inputs.size() <= feature_exact_pi_bound ? exact_signal_prob( n ) : signal_prob( n, feature_vectors, 0 );
  auto const cand = candidate_nets( n );
  if ( !cand.empty() )
  {
    double psum = 0, pmin = 1;
    std::size_t rare = 0;
    for ( auto id : cand )
    {
      psum += st.p[id];
      pmin = std::min( pmin, st.p[id] );
      rare += st.p[id] <= 0.05;
    }
    f[24] = static_cast<double>( rare ) / static_cast<double>( cand.size() );
    f[25] = psum / static_cast<double>( cand.size() );
    f[26] = pmin;
  }

  auto const s = scoap( n );
  for ( auto [slot, vals] : { std::pair{ 27, &s.cc0 }, std::pair{ 28, &s.cc1 }, std::pair{ 29, &s.co } } )
  {
    double sum = 0;
    std::size_t cnt = 0;
    for ( auto v : *vals )
      if ( v < scoap_cap )
      {
        sum += static_cast<double>( v );
        ++cnt;
      }
    f[slot] = cnt ? sum / static_cast<double>( cnt ) : 0.0;
  }

  auto const is_and = []( GateKind k ) { return k == GateKind::and_ || k == GateKind::nand; };
  std::size_t ands = 0, grouped = 0, xors = 0;
  std::vector<uint8_t> is_po( n.num_nets(), 0 );
  for ( auto po : n.outputs )
    is_po[po] = 1;
  for ( auto const& g : n.gates )
  {
    xors += g.kind == GateKind::xor_ || g.kind == GateKind::xnor;
    if ( !is_and( g.kind ) )
      continue;
    ++ands;
    auto const& readers = c.fanout[g.output];
    grouped += readers.size() == 1 && !is_po[g.output] && is_and( n.gates[readers[0]].kind );
  }
  f[30] = ands ? static_cast<double>( grouped ) / static_cast<double>( ands ) : 0.0;
  f[31] = gates ? static_cast<double>( xors ) / gates : 0.0;
  return f;
}

/* --------------------------------------------------------------------
 * PCA
 * ------------------------------------------------------------------ */

using Matrix = std::vector<std::vector<double>>;

struct PcaModel
{
  std::vector<double> mean;
  Matrix components; ///< C rows of length D
  std::vector<double> explained_variance;
  bool sign_convention = true; ///< largest-magnitude entry of each component is positive
  std::string warning;
};

namespace detail
{

inline constexpr double jacobi_tolerance = 1e-12;
inline constexpr int jacobi_max_sweeps = 100;

/// Cyclic Jacobi; returns eigenvalues, eigenvectors as columns of `v`.
inline std::vector<double> jacobi_eigen( Matrix a, Matrix& v )
{
  auto const d = a.size();
  v.assign( d, std::vector<double>( d, 0.0 ) );
  for ( std::size_t i = 0; i < d; ++i )
    v[i][i] = 1.0;
  double scale = 0;
  for ( auto const& r : a )
    for ( auto x : r )
      scale += x * x;
  scale = std::sqrt( scale );
  for ( int sweep = 0; sweep < jacobi_max_sweeps; ++sweep )
  {
    double off = 0;
    for ( std::size_t p = 0; p < d; ++p )
      for ( std::size_t q = p + 1; q < d; ++q )
        off += a[p][q] * a[p][q];
    if ( std::sqrt( off ) <= jacobi_tolerance * std::max( scale, 1e-300 ) )
      break;
    for ( std::size_t p = 0; p < d; ++p )
      for ( std::size_t q = p + 1; q < d; ++q )
      {
        if ( a[p][q] == 0.0 )
          continue;
        double const theta = ( a[q][q] - a[p][p] ) / ( 2 * a[p][q] );
        double const t = ( theta >= 0 ? 1.0 : -1.0 ) / ( std::abs( theta ) + std::sqrt( theta * theta + 1 ) );
        double const cs = 1 / std::sqrt( t * t + 1 ), sn = t * cs;
        for ( std::size_t k = 0; k < d; ++k )
        {
          double const akp = a[k][p], akq = a[k][q];
          a[k][p] = cs * akp - sn * akq;
          a[k][q] = sn * akp + cs * akq;
        }
        for ( std::size_t k = 0; k < d; ++k )
        {
          double const apk = a[p][k], aqk = a[q][k];
          a[p][k] = cs * apk - sn * aqk;
          a[q][k] = sn * apk + cs * aqk;
        }
        for ( std::size_t k = 0; k < d; ++k )
        {
          double const vkp = v[k][p], vkq = v[k][q];
          v[k][p] = cs * vkp - sn * vkq;
          v[k][q] = sn * vkp + cs * vkq;
        }
      }
  }
  std::vector<double> ev( d );
  for ( std::size_t i = 0; i < d; ++i )
    ev[i] = a[i][i];
  return ev;
}

inline std::size_t argmax_abs( std::vector<double> const& x )
{
  std::size_t best = 0;
  for ( std::size_t i = 1; i < x.size(); ++i )
    if ( std::abs( x[i] ) > std::abs( x[best] ) + 1e-12 )
      best = i;
  return best;
}

} // namespace detail

inline PcaModel pca_fit( Matrix const& rows, std::size_t components )
{
  if ( rows.size() < 2 )
    throw std::invalid_argument( "PCA needs at least two rows" );
  auto const d = rows[0].size();
  for ( auto const& r : rows )
    if ( r.size() != d )
      throw std::invalid_argument( "PCA rows differ in dimension" );
  if ( components < 1 || components > std::min( rows.size() - 1, d ) )
    throw std::invalid_argument( "PCA component count must lie in [1, min(rows - 1, dim)]" );

  PcaModel m;
  m.mean.assign( d, 0.0 );
  for ( auto const& r : rows )
    for ( std::size_t j = 0; j < d; ++j )
      m.mean[j] += r[j];
  for ( auto& x : m.mean )
    x /= static_cast<double>( rows.size() );
  Matrix cov( d, std::vector<double>( d, 0.0 ) );
  for ( auto const& r : rows )
    for ( std::size_t i = 0; i < d; ++i )
    {
      double const ci = r[i] - m.mean[i];
      if ( ci == 0.0 )
        continue;
      for ( std::size_t j = i; j < d; ++j )
        cov[i][j] += ci * ( r[j] - m.mean[j] );
    }
  bool degenerate = true;
  for ( std::size_t i = 0; i < d; ++i )
    for ( std::size_t j = i; j < d; ++j )
    {
      cov[i][j] /= static_cast<double>( rows.size() - 1 );
      cov[j][i] = cov[i][j];
      degenerate = degenerate && cov[i][j] == 0.0;
    }
  if ( degenerate )
    m.warning = "all rows identical; zero-variance model";

  Matrix v;
  auto const ev = detail::jacobi_eigen( cov, v );
  std::vector<std::vector<double>> vecs( d, std::vector<double>( d ) );
  for ( std::size_t c = 0; c < d; ++c )
  {
    for ( std::size_t k = 0; k < d; ++k )
      vecs[c][k] = v[k][c];
    if ( vecs[c][detail::argmax_abs( vecs[c] )] < 0 )
      for ( auto& x : vecs[c] )
        x = -x;
  }
  /* descending eigenvalue; near-ties by position of the dominant entry, then index */
  double const tie = 1e-12 * std::max( 1.0, *std::max_element( ev.begin(), ev.end() ) );
  std::vector<std::size_t> order( d );
  std::iota( order.begin(), order.end(), 0 );
  std::stable_sort( order.begin(), order.end(), [&]( auto a, auto b ) { return ev[a] > ev[b]; } );
  for ( std::size_t i = 0; i < d; )
  {
    std::size_t j = i + 1;
    while ( j < d && ev[order[i]] - ev[order[j]] <= tie )
      ++j;
    std::stable_sort( order.begin() + i, order.begin() + j, [&]( auto a, auto b ) {
      auto const pa = detail::argmax_abs( vecs[a] ), pb = detail::argmax_abs( vecs[b] );
      return pa != pb ? pa < pb : a < b;
    } );
    i = j;
  }
  /* variances stay sorted; inside a tie group they differ by at most `tie` */
  auto sorted = ev;
  std::sort( sorted.begin(), sorted.end(), std::greater<>() );
  for ( std::size_t c = 0; c < components; ++c )
  {
    m.components.push_back( vecs[order[c]] );
    m.explained_variance.push_back( std::max( 0.0, sorted[c] ) );
  }
  return m;
}

inline Matrix pca_project( PcaModel const& m, Matrix const& rows )
{
  Matrix out;
  out.reserve( rows.size() );
  for ( auto const& r : rows )
  {
    if ( r.size() != m.mean.size() )
      throw std::invalid_argument( "row dimension " + std::to_string( r.size() ) + " does not match model dimension " +
                                   std::to_string( m.mean.size() ) );
    std::vector<double> y( m.components.size(), 0.0 );
    for ( std::size_t c = 0; c < m.components.size(); ++c )
      for ( std::size_t j = 0; j < r.size(); ++j )
        y[c] += ( r[j] - m.mean[j] ) * m.components[c][j];
    out.push_back( std::move( y ) );
  }
  return out;
}

/// Maps coordinates back to feature space.
inline Matrix pca_reconstruct( PcaModel const& m, Matrix const& coords )
{
  Matrix out;
  for ( auto const& y : coords )
  {
    auto x = m.mean;
    for ( std::size_t c = 0; c < y.size(); ++c )
      for ( std::size_t j = 0; j < x.size(); ++j )
        x[j] += y[c] * m.components[c][j];
    out.push_back( std::move( x ) );
  }
  return out;
}

inline nlohmann::json to_json( PcaModel const& m )
{
  return { { "mean", m.mean },
           { "components", m.components },
           { "explained_variance", m.explained_variance },
           { "sign_convention", "largest-magnitude entry positive" },
           { "warning", m.warning } };
}

/* Two panels (PC1/PC2, PC3/PC4); '+' for infected rows, '-' for clean,
 * 'o' when unlabeled. */
inline std::string scatter_svg( Matrix const& coords, std::vector<int> const& labels = {} )
{
  auto const panels = std::min<std::size_t>( 2, ( coords.empty() ? 0 : coords[0].size() ) / 2 );
  double const w = 360, h = 360, pad = 30;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * std::max<std::size_t>( panels, 1 ) << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for ( std::size_t p = 0; p < panels; ++p )
  {
    auto const cx = 2 * p, cy = 2 * p + 1;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    for ( auto const& r : coords )
    {
      x0 = std::min( x0, r[cx] ), x1 = std::max( x1, r[cx] );
      y0 = std::min( y0, r[cy] ), y1 = std::max( y1, r[cy] );
    }
    if ( x1 - x0 < 1e-12 )
      x0 -= 1, x1 += 1;
    if ( y1 - y0 < 1e-12 )
      y0 -= 1, y1 += 1;
    double const ox = w * static_cast<double>( p );
    auto px = [&]( double x ) { return ox + pad + ( x - x0 ) / ( x1 - x0 ) * ( w - 2 * pad ); };
    auto py = [&]( double y ) { return h - pad - ( y - y0 ) / ( y1 - y0 ) * ( h - 2 * pad ); };
    s << "<rect x=\"" << ox + pad << "\" y=\"" << pad << "\" width=\"" << w - 2 * pad << "\" height=\"" << h - 2 * pad
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
    s << "<text x=\"" << ox + w / 2 << "\" y=\"" << h - 8 << "\" text-anchor=\"middle\">PC" << cx + 1 << "</text>\n";
    s << "<text x=\"" << ox + 12 << "\" y=\"" << h / 2 << "\" transform=\"rotate(-90 " << ox + 12 << " " << h / 2
      << ")\" text-anchor=\"middle\">PC" << cy + 1 << "</text>\n";
    for ( std::size_t i = 0; i < coords.size(); ++i )
    {
      int const lab = i < labels.size() ? labels[i] : -1;
      char const* mark = lab == 1 ? "+" : lab == 0 ? "-" : "o";
      char const* color = lab == 1 ? "#c0392b" : lab == 0 ? "#2471a3" : "#555";
      s << "<text x=\"" << px( coords[i][cx] ) << "\" y=\"" << py( coords[i][cy] ) + 4 << "\" fill=\"" << color
        << "\" text-anchor=\"middle\">" << mark << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

/* --------------------------------------------------------------------
 * Trigger search space
 * ------------------------------------------------------------------ */

using BigInt = boost::multiprecision::cpp_int;

struct StrategyProfile
{
  std::vector<std::pair<uint64_t, uint64_t>> nets; ///< (rare r_i, regular g_i) per strategy
  uint32_t max_width = 2;                         ///< M
};

inline BigInt binomial( uint64_t n, uint64_t k )
{
  if ( k > n )
    return 0;
  k = std::min( k, n - k );
  BigInt r = 1;
  for ( uint64_t i = 1; i <= k; ++i )
    r = r * ( n - k + i ) / i;
  return r;
}

/// Sum over widths q = 2..M, rare shares p = 0..q and strategies of C(r, p) C(g, q - p).
inline BigInt ht_space_size( StrategyProfile const& prof )
{
  if ( prof.max_width < 2 )
    throw std::invalid_argument( "maximum trigger width must be at least 2" );
  BigInt total = 0;
  for ( uint32_t q = 2; q <= prof.max_width; ++q )
    for ( uint32_t p = 0; p <= q; ++p )
      for ( auto const& [r, g] : prof.nets )
        total += binomial( r, p ) * binomial( g, q - p );
  return total;
}

inline StrategyProfile strategy_profile_from_json( nlohmann::json const& j )
{
  StrategyProfile p;
  try
  {
    p.max_width = j.at( "M" ).get<uint32_t>();
    for ( auto const& s : j.at( "strategies" ) )
    {
      auto const r = s.at( "r" ).get<int64_t>(), g = s.at( "g" ).get<int64_t>();
      if ( r < 0 || g < 0 )
        throw std::invalid_argument( "net counts must be non-negative" );
      p.nets.emplace_back( r, g );
    }
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw std::invalid_argument( std::string( "bad profile: " ) + e.what() );
  }
  if ( p.max_width < 2 )
    throw std::invalid_argument( "maximum trigger width must be at least 2" );
  return p;
}

/* --------------------------------------------------------------------
 * Hide and seek
 * ------------------------------------------------------------------ */

enum class HiderStrategy
{
  uniform ///< k distinct nodes uniformly at random
};

enum class SeekerStrategy
{
  uniform,   ///< uniform random query order
  sequential ///< nodes 0, 1, 2, ...
};

struct GameResult
{
  uint64_t trials = 0;
  double mean = 0;
  double stderr_mean = 0;
  std::map<uint64_t, uint64_t> histogram; ///< L -> trials
};

/* L counts queries until all k objects are found, at unit cost each.
 * With k = 0 (or objects left unfound) the seeker exhausts `budget`. */
inline GameResult seek_simulate( uint64_t nodes, uint64_t k, HiderStrategy, SeekerStrategy seeker, uint64_t trials,
                                 uint64_t seed, uint64_t budget )
{
  if ( k > nodes )
    throw std::invalid_argument( "cannot hide more objects than nodes" );
  if ( budget < 1 )
    throw std::invalid_argument( "query budget must be at least 1" );
  GameResult res;
  res.trials = trials;
  std::vector<uint64_t> order( nodes ), place( nodes );
  std::vector<uint8_t> hidden( nodes );
  double sum = 0, sq = 0;
  for ( uint64_t t = 0; t < trials; ++t )
  {
    Rng rng( derive_seed( seed, t ) );
    std::fill( hidden.begin(), hidden.end(), 0 );
    std::iota( place.begin(), place.end(), 0 );
    for ( uint64_t i = 0; i < k; ++i ) // partial Fisher-Yates
    {
      std::swap( place[i], place[i + rng.below( nodes - i )] );
      hidden[place[i]] = 1;
    }
    std::iota( order.begin(), order.end(), 0 );
    uint64_t found = 0, L = budget;
    if ( k > 0 )
      for ( uint64_t qn = 0; qn < std::min( nodes, budget ); ++qn )
      {
        if ( seeker == SeekerStrategy::uniform )
          std::swap( order[qn], order[qn + rng.below( nodes - qn )] );
        if ( hidden[order[qn]] && ++found == k )
        {
          L = qn + 1;
          break;
        }
      }
    ++res.histogram[L];
    sum += static_cast<double>( L );
    sq += static_cast<double>( L ) * static_cast<double>( L );
  }
  if ( trials )
  {
    auto const nt = static_cast<double>( trials );
    res.mean = sum / nt;
    res.stderr_mean = trials > 1 ? std::sqrt( std::max( 0.0, ( sq - sum * sum / nt ) / ( nt - 1 ) ) / nt ) : 0.0;
  }
  return res;
}

/// E[L] for uniform hider and seeker with unlimited budget, k >= 1.
inline double expected_game_length( uint64_t nodes, uint64_t k )
{
  if ( k == 0 || k > nodes )
    throw std::invalid_argument( "expected length needs 1 <= k <= nodes" );
  return static_cast<double>( k ) * static_cast<double>( nodes + 1 ) / static_cast<double>( k + 1 );
}

inline nlohmann::json to_json( GameResult const& r )
{
  nlohmann::json h = nlohmann::json::object();
  for ( auto const& [l, c] : r.histogram )
    h[std::to_string( l )] = c;
  return { { "trials", r.trials }, { "mean", r.mean }, { "stderr", r.stderr_mean }, { "histogram", h } };
}

} // namespace forge
