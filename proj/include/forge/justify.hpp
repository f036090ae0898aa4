#pragma once

/*!
  \file justify.hpp
  \brief Backtracking search for a PI assignment that sets AIG edges to 1

  PODEM-style: objectives are backtraced to a primary input, decisions
  are propagated by three-valued simulation over the target cone, and
  conflicts flip the most recent unflipped decision.  Runs are restarted
  with growing backtrack limits and randomized backtrace choices; a run
  that exhausts its decision tree proves the targets unsatisfiable.
*/

#include "aig.hpp"
#include "detail/rng.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace forge
{

enum class SearchStatus
{
  satisfiable,
  unsatisfiable,
  unknown
};

struct SearchResult
{
  SearchStatus status = SearchStatus::unknown;
  std::vector<uint8_t> pi_values; ///< one entry per PI (unconstrained inputs are 0)
  uint64_t backtracks = 0;
};

struct SearchOptions
{
  uint64_t budget = 100000;  ///< total backtracks over all restarts
  uint64_t first_limit = 64; ///< backtracks allowed in the first run
  uint64_t seed = 0;
};

namespace detail
{

class Podem
{
public:
  Podem( AigGraph const& g, std::span<AigEdge const> targets ) : g_( g ), targets_( targets.begin(), targets.end() )
  {
    std::vector<uint8_t> in_cone( g.size(), 0 );
    for ( auto t : targets_ )
      in_cone[t.index()] = 1;
    for ( uint32_t i = g.size(); i-- > 1; )
      if ( in_cone[i] && g.is_and( i ) )
      {
        in_cone[g.fanin0( i ).index()] = 1;
        in_cone[g.fanin1( i ).index()] = 1;
      }
    for ( uint32_t i = 1; i < g.size(); ++i )
      if ( in_cone[i] )
        ( g.is_pi( i ) ? support_ : cone_ ).push_back( i );
    value_.assign( g.size(), x_ );
    value_[0] = 1;

    /* values forced by the targets alone: an AND at 1 forces both fanins */
    std::vector<uint8_t> need( g.size(), x_ );
    std::vector<AigEdge> todo( targets_ );
    while ( !todo.empty() && !conflict_ )
    {
      auto const e = todo.back();
      todo.pop_back();
      auto const i = e.index();
      uint8_t const v = e.complemented() ? 0 : 1;
      if ( need[i] != x_ || i == 0 )
      {
        conflict_ = i == 0 ? v != 1 : need[i] != v;
        continue;
      }
      need[i] = v;
      if ( g.is_and( i ) && v == 1 )
      {
        todo.push_back( g.fanin0( i ) );
        todo.push_back( g.fanin1( i ) );
      }
      else if ( g.is_pi( i ) )
        forced_.emplace_back( i, v );
    }
  }

  /// One run; returns unknown when `limit` backtracks are exceeded.
  SearchStatus run( uint64_t limit, Rng* rng, uint64_t& backtracks )
  {
    stack_.clear();
    if ( conflict_ )
      return SearchStatus::unsatisfiable;
    for ( auto pi : support_ )
      value_[pi] = x_;
    for ( auto [pi, v] : forced_ )
      value_[pi] = v;
    imply();
    uint64_t local = 0;
    while ( true )
    {
      auto const s = status();
      if ( s == 1 )
        return SearchStatus::satisfiable;
      if ( s == 0 )
      {
        /* conflict: flip the latest unflipped decision */
        while ( !stack_.empty() && stack_.back().flipped )
        {
          value_[stack_.back().pi] = x_;
          stack_.pop_back();
        }
        if ( stack_.empty() )
          return SearchStatus::unsatisfiable;
        ++backtracks;
        if ( ++local > limit )
          return SearchStatus::unknown;
        auto& top = stack_.back();
        top.value ^= 1u;
        top.flipped = true;
        value_[top.pi] = top.value;
        imply();
        continue;
      }
      auto const [pi, v] = backtrace( rng );
      stack_.push_back( { pi, v, false } );
      value_[pi] = v;
      imply();
    }
  }

  std::vector<uint8_t> assignment() const
  {
    std::vector<uint8_t> out( g_.num_pis(), 0 );
    for ( uint32_t k = 0; k < g_.num_pis(); ++k )
      out[k] = value_[k + 1] == 1 ? 1 : 0;
    return out;
  }

private:
  static constexpr uint8_t x_ = 2;

  struct Decision
  {
    uint32_t pi;
    uint8_t value;
    bool flipped;
  };

  uint8_t edge_value( AigEdge e ) const
  {
    auto const v = value_[e.index()];
    return v == x_ ? x_ : static_cast<uint8_t>( v ^ ( e.complemented() ? 1u : 0u ) );
  }

  uint8_t eval( uint32_t i ) const
  {
    auto const a = edge_value( g_.fanin0( i ) ), b = edge_value( g_.fanin1( i ) );
    return ( a == 0 || b == 0 ) ? 0 : ( a == 1 && b == 1 ) ? 1 : x_;
  }

  void imply()
  {
    for ( auto i : cone_ )
      value_[i] = eval( i );
  }

  /// 1 when every target is 1, 0 on any target at 0, otherwise 2.
  int status() const
  {
    int s = 1;
    for ( auto t : targets_ )
    {
      auto const v = edge_value( t );
      if ( v == 0 )
        return 0;
      if ( v == x_ )
        s = 2;
    }
    return s;
  }

  std::pair<uint32_t, uint8_t> backtrace( Rng* rng ) const
  {
    AigEdge objective{};
    for ( auto t : targets_ )
      if ( edge_value( t ) == x_ )
      {
        objective = t;
        break;
      }
    uint32_t node = objective.index();
    uint8_t want = objective.complemented() ? 0 : 1;
    while ( g_.is_and( node ) )
    {
      auto const f0 = g_.fanin0( node ), f1 = g_.fanin1( node );
      bool const x0 = edge_value( f0 ) == x_, x1 = edge_value( f1 ) == x_;
      AigEdge next;
      if ( x0 && x1 )
      {
        /* all inputs needed: hardest (deepest) first; any input suffices: easiest first */
        bool pick_first = want == 1 ? g_.level( f0.index() ) >= g_.level( f1.index() )
                                    : g_.level( f0.index() ) <= g_.level( f1.index() );
        if ( rng && rng->below( 4 ) == 0 )
          pick_first = !pick_first;
        next = pick_first ? f0 : f1;
      }
      else
        next = x0 ? f0 : f1;
      want = static_cast<uint8_t>( want ^ ( next.complemented() ? 1u : 0u ) );
      node = next.index();
    }
    return { node, want };
  }

  AigGraph const& g_;
  std::vector<AigEdge> targets_;
  std::vector<uint32_t> cone_, support_;
  std::vector<uint8_t> value_;
  std::vector<std::pair<uint32_t, uint8_t>> forced_;
  bool conflict_ = false;
  std::vector<Decision> stack_;
};

} // namespace detail

/// Searches for PI values that make every edge in `targets` evaluate to 1.
inline SearchResult justify( AigGraph const& g, std::span<AigEdge const> targets, SearchOptions const& opt = {} )
{
  SearchResult result;
  for ( auto t : targets )
    if ( t == aig_false )
    {
      result.status = SearchStatus::unsatisfiable;
      return result;
    }
  detail::Podem podem( g, targets );
  Rng rng( opt.seed );
  uint64_t limit = std::max<uint64_t>( 1, opt.first_limit );
  bool first = true;
  while ( true )
  {
    auto const remaining = opt.budget > result.backtracks ? opt.budget - result.backtracks : 0;
    auto const status = podem.run( std::min( limit, remaining ), first ? nullptr : &rng, result.backtracks );
    first = false;
    if ( status != SearchStatus::unknown )
    {
      result.status = status;
      if ( status == SearchStatus::satisfiable )
        result.pi_values = podem.assignment();
      return result;
    }
    if ( result.backtracks >= opt.budget )
      return result;
    limit *= 2;
  }
}

} // namespace forge
