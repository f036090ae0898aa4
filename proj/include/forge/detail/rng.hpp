#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace forge
{

/* Seeded randomness with platform-independent results.
 *
 * The standard distributions are implementation-defined, so every draw
 * goes through the helpers below, which only rely on the raw 64-bit
 * output of mt19937_64 (fully specified by the standard). */

inline constexpr uint64_t splitmix64( uint64_t x ) noexcept
{
  x += 0x9e3779b97f4a7c15ull;
  x = ( x ^ ( x >> 30 ) ) * 0xbf58476d1ce4e5b9ull;
  x = ( x ^ ( x >> 27 ) ) * 0x94d049bb133111ebull;
  return x ^ ( x >> 31 );
}

/// Derives an independent stream seed from a master seed and a stream index.
inline constexpr uint64_t derive_seed( uint64_t master, uint64_t stream ) noexcept
{
  return splitmix64( splitmix64( master ) ^ splitmix64( stream + 0x632be59bd9b4e019ull ) );
}

class Rng
{
public:
  explicit Rng( uint64_t seed = 0 ) : engine_( splitmix64( seed ) ) {}

  uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound); bound must be positive.
  uint64_t below( uint64_t bound )
  {
    const uint64_t limit = ~uint64_t{ 0 } - ( ~uint64_t{ 0 } % bound );
    uint64_t x;
    do
    {
      x = engine_();
    } while ( x >= limit );
    return x % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>( engine_() >> 11 ) * 0x1.0p-53; }

  bool bernoulli( double p ) { return uniform() < p; }

  template<typename T>
  void shuffle( std::vector<T>& v )
  {
    for ( std::size_t i = v.size(); i > 1; --i )
      std::swap( v[i - 1], v[below( i )] );
  }

  template<typename T>
  T const& pick( std::vector<T> const& v ) { return v[below( v.size() )]; }

private:
  std::mt19937_64 engine_;
};

} // namespace forge
