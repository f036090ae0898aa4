#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace forge::detail
{

/// Lower-case hex SHA-256 of `data`.
inline std::string sha256_hex( std::string_view data )
{
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if ( EVP_Digest( data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr ) != 1 )
    throw std::runtime_error( "sha256 failed" );
  std::string hex;
  hex.reserve( 2 * len );
  char buf[3];
  for ( unsigned int k = 0; k < len; ++k )
  {
    std::snprintf( buf, sizeof buf, "%02x", md[k] );
    hex += buf;
  }
  return hex;
}

} // namespace forge::detail
