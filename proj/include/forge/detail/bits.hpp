#pragma once

#include "rng.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>

namespace forge::detail
{

inline constexpr uint64_t var_masks[6] = {
    0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
    0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull };

inline constexpr std::size_t words_for( std::size_t bits ) { return ( bits + 63 ) / 64; }

/// Mask of the valid bits in the last word of a `bits`-wide signature.
inline constexpr uint64_t tail_mask( std::size_t bits )
{
  return ( bits % 64 ) == 0 ? ~uint64_t{ 0 } : ( ( uint64_t{ 1 } << ( bits % 64 ) ) - 1 );
}

/* Fills `out` (num_inputs x words, input-major) with the exhaustive
 * patterns first_word*64 ... first_word*64 + words*64 - 1.  Bit b of
 * word w of input i is bit i of the pattern index. */
inline void exhaustive_patterns( std::size_t num_inputs, uint64_t first_word, std::size_t words,
                                 std::span<uint64_t> out )
{
  for ( std::size_t i = 0; i < num_inputs; ++i )
  {
    for ( std::size_t w = 0; w < words; ++w )
    {
      uint64_t value;
      if ( i < 6 )
        value = var_masks[i];
      else
        value = ( ( ( first_word + w ) >> ( i - 6 ) ) & 1u ) ? ~uint64_t{ 0 } : 0u;
      out[i * words + w] = value;
    }
  }
}

inline void random_patterns( Rng& rng, std::size_t num_inputs, std::size_t words, std::span<uint64_t> out )
{
  for ( std::size_t k = 0; k < num_inputs * words; ++k )
    out[k] = rng.next();
}

inline std::size_t popcount( std::span<uint64_t const> words, std::size_t bits )
{
  std::size_t total = 0;
  for ( std::size_t w = 0; w < words.size(); ++w )
  {
    uint64_t v = words[w];
    if ( w + 1 == words.size() )
      v &= tail_mask( bits );
    total += static_cast<std::size_t>( std::popcount( v ) );
  }
  return total;
}

} // namespace forge::detail
