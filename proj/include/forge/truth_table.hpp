#pragma once

/*!
  \file truth_table.hpp
  \brief Dynamic truth tables, irredundant sum-of-products, algebraic factoring
*/

#include "detail/bits.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace forge
{

inline constexpr uint32_t max_truth_table_vars = 16;

class TruthTable
{
public:
  TruthTable() : TruthTable( 0 ) {}

  explicit TruthTable( uint32_t num_vars ) : num_vars_( num_vars ), bits_( word_count( num_vars ), 0 )
  {
    if ( num_vars > max_truth_table_vars )
      throw std::invalid_argument( "truth table wider than 16 variables" );
  }

  static TruthTable nth_var( uint32_t num_vars, uint32_t var )
  {
    TruthTable t( num_vars );
    for ( std::size_t w = 0; w < t.bits_.size(); ++w )
      t.bits_[w] = var < 6 ? detail::var_masks[var] : ( ( ( w >> ( var - 6 ) ) & 1u ) ? ~uint64_t{ 0 } : 0u );
    t.mask();
    return t;
  }

  static TruthTable constant( uint32_t num_vars, bool value )
  {
    TruthTable t( num_vars );
    if ( value )
      std::fill( t.bits_.begin(), t.bits_.end(), ~uint64_t{ 0 } );
    t.mask();
    return t;
  }

  uint32_t num_vars() const { return num_vars_; }
  uint64_t num_bits() const { return uint64_t{ 1 } << num_vars_; }
  std::vector<uint64_t> const& words() const { return bits_; }
  std::vector<uint64_t>& words() { return bits_; }

  bool bit( uint64_t i ) const { return ( bits_[i / 64] >> ( i % 64 ) ) & 1u; }
  void set_bit( uint64_t i, bool v )
  {
    if ( v )
      bits_[i / 64] |= uint64_t{ 1 } << ( i % 64 );
    else
      bits_[i / 64] &= ~( uint64_t{ 1 } << ( i % 64 ) );
  }

  bool is_const0() const
  {
    return std::all_of( bits_.begin(), bits_.end(), []( uint64_t w ) { return w == 0; } );
  }
  bool is_const1() const { return *this == constant( num_vars_, true ); }

  uint64_t count_ones() const
  {
    uint64_t c = 0;
    for ( auto w : bits_ )
      c += static_cast<uint64_t>( std::popcount( w ) );
    return c;
  }

  TruthTable operator~() const
  {
    TruthTable t = *this;
    for ( auto& w : t.bits_ )
      w = ~w;
    t.mask();
    return t;
  }

  TruthTable& operator&=( TruthTable const& o ) { return combine( o, []( uint64_t a, uint64_t b ) { return a & b; } ); }
  TruthTable& operator|=( TruthTable const& o ) { return combine( o, []( uint64_t a, uint64_t b ) { return a | b; } ); }
  TruthTable& operator^=( TruthTable const& o ) { return combine( o, []( uint64_t a, uint64_t b ) { return a ^ b; } ); }

  friend TruthTable operator&( TruthTable a, TruthTable const& b ) { return a &= b; }
  friend TruthTable operator|( TruthTable a, TruthTable const& b ) { return a |= b; }
  friend TruthTable operator^( TruthTable a, TruthTable const& b ) { return a ^= b; }
  friend bool operator==( TruthTable const& a, TruthTable const& b )
  {
    return a.num_vars_ == b.num_vars_ && a.bits_ == b.bits_;
  }

  /// Cofactor with `var` fixed to `value`, still over the same variables.
  TruthTable cofactor( uint32_t var, bool value ) const
  {
    TruthTable t = *this;
    if ( var < 6 )
    {
      auto const shift = 1u << var;
      auto const m = detail::var_masks[var];
      for ( auto& w : t.bits_ )
        w = value ? ( ( w & m ) | ( ( w & m ) >> shift ) ) : ( ( w & ~m ) | ( ( w & ~m ) << shift ) );
    }
    else
    {
      auto const step = std::size_t{ 1 } << ( var - 6 );
      for ( std::size_t w = 0; w < t.bits_.size(); w += 2 * step )
        for ( std::size_t k = 0; k < step; ++k )
        {
          auto const v = value ? bits_[w + step + k] : bits_[w + k];
          t.bits_[w + k] = v;
          t.bits_[w + step + k] = v;
        }
    }
    t.mask();
    return t;
  }

  bool depends_on( uint32_t var ) const { return cofactor( var, false ) != cofactor( var, true ); }

private:
  static std::size_t word_count( uint32_t n ) { return n <= 6 ? 1 : std::size_t{ 1 } << ( n - 6 ); }

  void mask()
  {
    if ( num_vars_ < 6 )
      bits_[0] &= ( uint64_t{ 1 } << ( 1u << num_vars_ ) ) - 1;
  }

  template<typename Op>
  TruthTable& combine( TruthTable const& o, Op op )
  {
    assert( num_vars_ == o.num_vars_ );
    for ( std::size_t w = 0; w < bits_.size(); ++w )
      bits_[w] = op( bits_[w], o.bits_[w] );
    return *this;
  }

  uint32_t num_vars_;
  std::vector<uint64_t> bits_;
};

/// Product term: bit v of `pos` (resp. `neg`) means literal x_v (resp. !x_v).
struct Cube
{
  uint32_t pos = 0;
  uint32_t neg = 0;

  uint32_t num_literals() const { return static_cast<uint32_t>( std::popcount( pos ) + std::popcount( neg ) ); }
  friend bool operator==( Cube const&, Cube const& ) = default;
};

namespace detail
{

inline TruthTable isop_rec( TruthTable const& lower, TruthTable const& upper, int32_t var, std::vector<Cube>& cubes )
{
  auto const n = lower.num_vars();
  if ( lower.is_const0() )
    return TruthTable::constant( n, false );
  if ( upper.is_const1() )
  {
    cubes.push_back( Cube{} );
    return TruthTable::constant( n, true );
  }
  /* highest variable either bound depends on */
  while ( var >= 0 && !lower.depends_on( var ) && !upper.depends_on( var ) )
    --var;
  assert( var >= 0 );
  auto const v = static_cast<uint32_t>( var );

  auto const l0 = lower.cofactor( v, false ), l1 = lower.cofactor( v, true );
  auto const u0 = upper.cofactor( v, false ), u1 = upper.cofactor( v, true );

  auto const first = cubes.size();
  auto const c0 = isop_rec( l0 & ~u1, u0, var - 1, cubes );
  for ( auto i = first; i < cubes.size(); ++i )
    cubes[i].neg |= 1u << v;
  auto const mid = cubes.size();
  auto const c1 = isop_rec( l1 & ~u0, u1, var - 1, cubes );
  for ( auto i = mid; i < cubes.size(); ++i )
    cubes[i].pos |= 1u << v;
  auto const rest_lower = ( l0 & ~c0 ) | ( l1 & ~c1 );
  auto const cs = isop_rec( rest_lower, u0 & u1, var - 1, cubes );

  auto const x = TruthTable::nth_var( n, v );
  return ( c0 & ~x ) | ( c1 & x ) | cs;
}

} // namespace detail

/// Irredundant sum-of-products cover of `f` (Minato-Morreale).
inline std::vector<Cube> isop( TruthTable const& f )
{
  std::vector<Cube> cubes;
  detail::isop_rec( f, f, static_cast<int32_t>( f.num_vars() ) - 1, cubes );
  return cubes;
}

/* --------------------------------------------------------------------
 * Factored forms
 * ------------------------------------------------------------------ */

struct FactoredForm
{
  enum class Kind : uint8_t
  {
    const0,
    const1,
    literal,
    and_,
    or_
  };
  Kind kind = Kind::const0;
  uint32_t var = 0;
  bool negated = false;
  std::vector<FactoredForm> children;

  static FactoredForm constant( bool v ) { return { v ? Kind::const1 : Kind::const0, 0, false, {} }; }
  static FactoredForm literal( uint32_t var, bool neg ) { return { Kind::literal, var, neg, {} }; }

  /// Number of two-input gates needed to build the form.
  uint32_t cost() const
  {
    if ( kind != Kind::and_ && kind != Kind::or_ )
      return 0;
    uint32_t c = static_cast<uint32_t>( children.size() ) - 1;
    for ( auto const& ch : children )
      c += ch.cost();
    return c;
  }

  TruthTable evaluate( uint32_t num_vars ) const
  {
    switch ( kind )
    {
    case Kind::const0:
      return TruthTable::constant( num_vars, false );
    case Kind::const1:
      return TruthTable::constant( num_vars, true );
    case Kind::literal:
    {
      auto t = TruthTable::nth_var( num_vars, var );
      return negated ? ~t : t;
    }
    case Kind::and_:
    case Kind::or_:
    {
      auto t = children.front().evaluate( num_vars );
      for ( std::size_t i = 1; i < children.size(); ++i )
        kind == Kind::and_ ? t &= children[i].evaluate( num_vars ) : t |= children[i].evaluate( num_vars );
      return t;
    }
    }
    return TruthTable( num_vars );
  }
};

namespace detail
{

inline FactoredForm make_node( FactoredForm::Kind kind, std::vector<FactoredForm> parts )
{
  /* flatten same-kind children */
  std::vector<FactoredForm> flat;
  for ( auto& p : parts )
  {
    if ( p.kind == kind )
      for ( auto& c : p.children )
        flat.push_back( std::move( c ) );
    else
      flat.push_back( std::move( p ) );
  }
  if ( flat.size() == 1 )
    return std::move( flat.front() );
  FactoredForm f;
  f.kind = kind;
  f.children = std::move( flat );
  return f;
}

inline FactoredForm cube_form( Cube const& c )
{
  std::vector<FactoredForm> lits;
  for ( uint32_t v = 0; v < 32; ++v )
  {
    if ( ( c.pos >> v ) & 1u )
      lits.push_back( FactoredForm::literal( v, false ) );
    if ( ( c.neg >> v ) & 1u )
      lits.push_back( FactoredForm::literal( v, true ) );
  }
  if ( lits.empty() )
    return FactoredForm::constant( true );
  return make_node( FactoredForm::Kind::and_, std::move( lits ) );
}

inline FactoredForm factor_cubes( std::vector<Cube> cubes )
{
  using Kind = FactoredForm::Kind;
  if ( cubes.empty() )
    return FactoredForm::constant( false );
  for ( auto const& c : cubes )
    if ( c.pos == 0 && c.neg == 0 )
      return FactoredForm::constant( true );
  if ( cubes.size() == 1 )
    return cube_form( cubes.front() );

  /* common cube */
  Cube common{ ~0u, ~0u };
  for ( auto const& c : cubes )
  {
    common.pos &= c.pos;
    common.neg &= c.neg;
  }
  if ( common.pos || common.neg )
  {
    for ( auto& c : cubes )
    {
      c.pos &= ~common.pos;
      c.neg &= ~common.neg;
    }
    return make_node( Kind::and_, { cube_form( common ), factor_cubes( std::move( cubes ) ) } );
  }

  /* most frequent literal; literal id 2v (+1 when negative), smallest id on ties */
  uint32_t best = 0, best_count = 0;
  for ( uint32_t lit = 0; lit < 64; ++lit )
  {
    uint32_t count = 0;
    for ( auto const& c : cubes )
      count += ( ( ( lit & 1u ) ? c.neg : c.pos ) >> ( lit / 2 ) ) & 1u;
    if ( count > best_count )
    {
      best = lit;
      best_count = count;
    }
  }
  if ( best_count < 2 )
  {
    std::vector<FactoredForm> terms;
    for ( auto const& c : cubes )
      terms.push_back( cube_form( c ) );
    return make_node( Kind::or_, std::move( terms ) );
  }

  auto const bit = 1u << ( best / 2 );
  bool const neg = best & 1u;
  std::vector<Cube> quotient, rest;
  for ( auto c : cubes )
  {
    if ( ( neg ? c.neg : c.pos ) & bit )
    {
      ( neg ? c.neg : c.pos ) &= ~bit;
      quotient.push_back( c );
    }
    else
      rest.push_back( c );
  }
  auto lit = FactoredForm::literal( best / 2, neg );
  auto divided = make_node( Kind::and_, { std::move( lit ), factor_cubes( std::move( quotient ) ) } );
  if ( rest.empty() )
    return divided;
  return make_node( Kind::or_, { std::move( divided ), factor_cubes( std::move( rest ) ) } );
}

} // namespace detail

/// Algebraic factoring of an SOP cover by repeated literal division.
inline FactoredForm factor( std::vector<Cube> const& cubes ) { return detail::factor_cubes( cubes ); }

/// A factored form of `f` (or of its complement, flagged by `complemented`).
struct Synthesis
{
  FactoredForm form;
  bool complemented = false;
};

/// Cheapest of the factored ISOPs of f and !f.
inline Synthesis synthesize( TruthTable const& f )
{
  auto pos = factor( isop( f ) );
  auto neg = factor( isop( ~f ) );
  if ( neg.cost() < pos.cost() )
    return { std::move( neg ), true };
  return { std::move( pos ), false };
}

} // namespace forge
