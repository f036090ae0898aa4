#pragma once

/*!
  \file netlist.hpp
  \brief Gate-level combinational netlists

  A netlist is a directed acyclic graph of primitive gates over the set
  {BUF, NOT, AND, OR, XOR, NAND, NOR, XNOR}.  Nets are identified by
  dense integer ids; two reserved nets carry the constants 1'b0 and 1'b1.
*/

#include "detail/bits.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace forge
{

enum class GateKind : uint8_t
{
  buf,
  not_,
  and_,
  or_,
  xor_,
  nand,
  nor,
  xnor
};

inline constexpr GateKind all_gate_kinds[] = { GateKind::buf, GateKind::not_, GateKind::and_, GateKind::or_,
                                               GateKind::xor_, GateKind::nand, GateKind::nor, GateKind::xnor };

inline constexpr std::string_view to_string( GateKind kind )
{
  constexpr std::string_view names[] = { "buf", "not", "and", "or", "xor", "nand", "nor", "xnor" };
  return names[static_cast<std::size_t>( kind )];
}

inline std::optional<GateKind> gate_kind_from_string( std::string_view s )
{
  for ( auto k : all_gate_kinds )
    if ( to_string( k ) == s )
      return k;
  return std::nullopt;
}

inline constexpr bool is_unary( GateKind kind ) { return kind == GateKind::buf || kind == GateKind::not_; }

/// Evaluates a gate on 64 patterns at once; multi-input gates fold left.
inline uint64_t evaluate_gate( GateKind kind, std::span<uint64_t const> in )
{
  uint64_t acc = in[0];
  switch ( kind )
  {
  case GateKind::buf:
    return acc;
  case GateKind::not_:
    return ~acc;
  case GateKind::and_:
  case GateKind::nand:
    for ( std::size_t i = 1; i < in.size(); ++i )
      acc &= in[i];
    break;
  case GateKind::or_:
  case GateKind::nor:
    for ( std::size_t i = 1; i < in.size(); ++i )
      acc |= in[i];
    break;
  case GateKind::xor_:
  case GateKind::xnor:
    for ( std::size_t i = 1; i < in.size(); ++i )
      acc ^= in[i];
    break;
  }
  if ( kind == GateKind::nand || kind == GateKind::nor || kind == GateKind::xnor )
    acc = ~acc;
  return acc;
}

using NetId = uint32_t;

struct Gate
{
  GateKind kind;
  std::vector<NetId> inputs;
  NetId output;
  std::string name;
};

inline constexpr std::string_view const0_name = "1'b0";
inline constexpr std::string_view const1_name = "1'b1";

class Netlist
{
public:
  Netlist() = default;
  explicit Netlist( std::string module_name ) : name( std::move( module_name ) ) {}

  std::string name;
  std::vector<NetId> inputs;
  std::vector<NetId> outputs;
  std::vector<Gate> gates;

  /// Returns the id of net `net_name`, creating it when absent.
  NetId net( std::string_view net_name )
  {
    if ( auto it = index_.find( std::string( net_name ) ); it != index_.end() )
      return it->second;
    auto const id = static_cast<NetId>( names_.size() );
    names_.emplace_back( net_name );
    index_.emplace( names_.back(), id );
    return id;
  }

  std::optional<NetId> find_net( std::string_view net_name ) const
  {
    if ( auto it = index_.find( std::string( net_name ) ); it != index_.end() )
      return it->second;
    return std::nullopt;
  }

  NetId constant( bool value ) { return net( value ? const1_name : const0_name ); }

  std::optional<bool> constant_value( NetId id ) const
  {
    if ( names_[id] == const0_name )
      return false;
    if ( names_[id] == const1_name )
      return true;
    return std::nullopt;
  }

  bool is_constant( NetId id ) const { return constant_value( id ).has_value(); }

  std::string const& net_name( NetId id ) const { return names_.at( id ); }
  std::size_t num_nets() const { return names_.size(); }

  NetId add_input( std::string_view net_name )
  {
    auto const id = net( net_name );
    inputs.push_back( id );
    return id;
  }

  NetId add_output( std::string_view net_name )
  {
    auto const id = net( net_name );
    outputs.push_back( id );
    return id;
  }

  NetId add_gate( GateKind kind, std::vector<NetId> fanins, std::string_view output, std::string instance = {} )
  {
    auto const out = net( output );
    if ( instance.empty() )
      instance = "g" + std::to_string( gates.size() );
    gates.push_back( Gate{ kind, std::move( fanins ), out, std::move( instance ) } );
    return out;
  }

  /// Renames a net in place; the new name must be unused.
  void rename_net( NetId id, std::string const& new_name )
  {
    if ( index_.count( new_name ) )
      throw std::invalid_argument( "net name already in use: " + new_name );
    index_.erase( names_[id] );
    names_[id] = new_name;
    index_.emplace( new_name, id );
  }

  std::size_t num_gates() const { return gates.size(); }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NetId> index_;
};

/* --------------------------------------------------------------------
 * Connectivity
 * ------------------------------------------------------------------ */

inline constexpr int32_t driver_input = -1;
inline constexpr int32_t driver_constant = -2;
inline constexpr int32_t driver_none = -3;

/// Driver and fanout tables plus a topological gate order.
struct Connectivity
{
  std::vector<int32_t> driver;                 ///< gate index, or one of the driver_* tags
  std::vector<std::vector<uint32_t>> fanout;   ///< gate indices reading each net
  std::vector<uint32_t> order;                 ///< gates in topological order
  bool acyclic = true;
};

/// Builds connectivity; on multiple drivers the first one wins (validate() reports the rest).
inline Connectivity connectivity( Netlist const& n )
{
  Connectivity c;
  c.driver.assign( n.num_nets(), driver_none );
  c.fanout.resize( n.num_nets() );
  for ( NetId id = 0; id < n.num_nets(); ++id )
    if ( n.is_constant( id ) )
      c.driver[id] = driver_constant;
  for ( auto pi : n.inputs )
    if ( c.driver[pi] == driver_none )
      c.driver[pi] = driver_input;
  for ( uint32_t g = 0; g < n.gates.size(); ++g )
  {
    auto const out = n.gates[g].output;
    if ( c.driver[out] == driver_none )
      c.driver[out] = static_cast<int32_t>( g );
    for ( auto in : n.gates[g].inputs )
      c.fanout[in].push_back( g );
  }

  /* Kahn's algorithm; the smallest ready gate index goes first */
  std::vector<uint32_t> pending( n.gates.size(), 0 );
  std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
  for ( uint32_t g = 0; g < n.gates.size(); ++g )
  {
    for ( auto in : n.gates[g].inputs )
      if ( c.driver[in] >= 0 )
        ++pending[g];
    if ( pending[g] == 0 )
      ready.push( g );
  }
  while ( !ready.empty() )
  {
    auto const g = ready.top();
    ready.pop();
    c.order.push_back( g );
    auto const out = n.gates[g].output;
    if ( c.driver[out] != static_cast<int32_t>( g ) )
      continue;
    for ( auto h : c.fanout[out] )
      if ( --pending[h] == 0 )
        ready.push( h );
  }
  c.acyclic = c.order.size() == n.gates.size();
  return c;
}

/* --------------------------------------------------------------------
 * Validation
 * ------------------------------------------------------------------ */

struct Diagnostic
{
  std::string code; ///< cycle, multiple-driver, undriven, arity, port
  std::string message;
  std::vector<std::string> nets;
};

namespace detail
{

inline std::vector<std::string> find_cycle( Netlist const& n, Connectivity const& c )
{
  /* DFS over nets following driver edges; returns the first cycle found */
  std::vector<uint8_t> state( n.num_nets(), 0 );
  std::vector<NetId> stack;
  std::vector<std::string> cycle;

  auto visit = [&]( auto&& self, NetId net ) -> bool {
    if ( state[net] == 2 )
      return false;
    if ( state[net] == 1 )
    {
      auto it = std::find( stack.begin(), stack.end(), net );
      for ( ; it != stack.end(); ++it )
        cycle.push_back( n.net_name( *it ) );
      return true;
    }
    state[net] = 1;
    stack.push_back( net );
    if ( c.driver[net] >= 0 )
      for ( auto in : n.gates[c.driver[net]].inputs )
        if ( self( self, in ) )
          return true;
    stack.pop_back();
    state[net] = 2;
    return false;
  };

  for ( auto const& gate : n.gates )
    if ( visit( visit, gate.output ) )
      break;
  return cycle;
}

} // namespace detail

/// Reports every violated netlist invariant; empty means the netlist is well formed.
inline std::vector<Diagnostic> validate( Netlist const& n )
{
  std::vector<Diagnostic> out;
  auto const num_nets = n.num_nets();
  for ( auto const& gate : n.gates )
  {
    bool in_range = gate.output < num_nets;
    for ( auto in : gate.inputs )
      in_range = in_range && in < num_nets;
    if ( !in_range )
    {
      out.push_back( { "undriven", "gate " + gate.name + " references an unknown net", {} } );
      return out;
    }
  }

  auto const c = connectivity( n );

  std::vector<std::vector<std::string>> drivers( num_nets );
  for ( auto pi : n.inputs )
    drivers[pi].push_back( "input port" );
  for ( NetId id = 0; id < num_nets; ++id )
    if ( n.is_constant( id ) )
      drivers[id].push_back( "constant" );
  for ( auto const& gate : n.gates )
    drivers[gate.output].push_back( "gate " + gate.name );
  for ( NetId id = 0; id < num_nets; ++id )
  {
    if ( drivers[id].size() > 1 )
    {
      std::string who;
      for ( auto const& d : drivers[id] )
        who += ( who.empty() ? "" : ", " ) + d;
      out.push_back( { "multiple-driver", "net " + n.net_name( id ) + " has multiple drivers (" + who + ")",
                       { n.net_name( id ) } } );
    }
  }

  for ( auto const& gate : n.gates )
  {
    auto const arity = gate.inputs.size();
    if ( ( is_unary( gate.kind ) && arity != 1 ) || ( !is_unary( gate.kind ) && arity < 2 ) )
      out.push_back( { "arity",
                       "gate " + gate.name + " (" + std::string( to_string( gate.kind ) ) + ") has " +
                           std::to_string( arity ) + " inputs",
                       { n.net_name( gate.output ) } } );
    for ( auto in : gate.inputs )
      if ( drivers[in].empty() )
        out.push_back( { "undriven", "gate " + gate.name + " reads undriven net " + n.net_name( in ),
                         { n.net_name( in ) } } );
  }

  std::vector<uint8_t> seen_in( num_nets, 0 ), seen_out( num_nets, 0 );
  for ( auto pi : n.inputs )
  {
    if ( seen_in[pi]++ )
      out.push_back( { "port", "input " + n.net_name( pi ) + " declared twice", { n.net_name( pi ) } } );
    if ( n.is_constant( pi ) )
      out.push_back( { "port", "constant used as input port", { n.net_name( pi ) } } );
  }
  for ( auto po : n.outputs )
  {
    if ( seen_out[po]++ )
      out.push_back( { "port", "output " + n.net_name( po ) + " declared twice", { n.net_name( po ) } } );
    if ( seen_in[po] )
      out.push_back( { "port", "net " + n.net_name( po ) + " is both input and output", { n.net_name( po ) } } );
    if ( drivers[po].empty() )
      out.push_back( { "undriven", "output " + n.net_name( po ) + " is undriven", { n.net_name( po ) } } );
  }

  if ( !c.acyclic )
  {
    auto cycle = detail::find_cycle( n, c );
    std::string text;
    for ( auto const& s : cycle )
      text += ( text.empty() ? "" : " -> " ) + s;
    out.push_back( { "cycle", "combinational cycle through " + text, cycle } );
  }
  return out;
}

/// Non-fatal findings: outputs tied to constants and dangling gates.
inline std::vector<Diagnostic> lint( Netlist const& n )
{
  std::vector<Diagnostic> out;
  for ( auto po : n.outputs )
    if ( n.is_constant( po ) )
      out.push_back( { "constant-output", "output tied to constant " + n.net_name( po ), { n.net_name( po ) } } );
  return out;
}

class NetlistError : public std::runtime_error
{
public:
  explicit NetlistError( std::vector<Diagnostic> diagnostics )
      : std::runtime_error( summarize( diagnostics ) ), diagnostics_( std::move( diagnostics ) ) {}

  std::vector<Diagnostic> const& diagnostics() const { return diagnostics_; }

private:
  static std::string summarize( std::vector<Diagnostic> const& d )
  {
    std::string s = "invalid netlist";
    for ( auto const& x : d )
      s += "; " + x.message;
    return s;
  }
  std::vector<Diagnostic> diagnostics_;
};

inline void require_valid( Netlist const& n )
{
  if ( auto d = validate( n ); !d.empty() )
    throw NetlistError( std::move( d ) );
}

/* --------------------------------------------------------------------
 * Simulation
 * ------------------------------------------------------------------ */

/// Bit-parallel simulator; the netlist must outlive it.
class Simulator
{
public:
  explicit Simulator( Netlist const& n ) : ntk_( &n ), conn_( connectivity( n ) )
  {
    if ( !conn_.acyclic )
      throw NetlistError( validate( n ) );
  }

  /* `pi_words` holds one row of `words` words per primary input (in
   * port order).  `values` receives one row per net. */
  void run( std::span<uint64_t const> pi_words, std::size_t words, std::vector<uint64_t>& values ) const
  {
    auto const& n = *ntk_;
    if ( pi_words.size() != n.inputs.size() * words )
      throw std::invalid_argument( "stimulus width mismatch" );
    values.assign( n.num_nets() * words, 0 );
    for ( NetId id = 0; id < n.num_nets(); ++id )
      if ( n.constant_value( id ) == true )
        std::fill_n( values.begin() + id * words, words, ~uint64_t{ 0 } );
    for ( std::size_t i = 0; i < n.inputs.size(); ++i )
      std::copy_n( pi_words.begin() + i * words, words, values.begin() + n.inputs[i] * words );

    std::vector<uint64_t> operands;
    for ( auto g : conn_.order )
    {
      auto const& gate = n.gates[g];
      operands.resize( gate.inputs.size() );
      for ( std::size_t w = 0; w < words; ++w )
      {
        for ( std::size_t k = 0; k < gate.inputs.size(); ++k )
          operands[k] = values[gate.inputs[k] * words + w];
        values[gate.output * words + w] = evaluate_gate( gate.kind, operands );
      }
    }
  }

  Netlist const& netlist() const { return *ntk_; }
  Connectivity const& topology() const { return conn_; }

private:
  Netlist const* ntk_;
  Connectivity conn_;
};

/// Values keyed by net name.
using Assignment = std::map<std::string, bool>;

/// Scalar simulation; the stimulus must bind every primary input.
inline Assignment simulate( Netlist const& n, Assignment const& stimulus )
{
  std::vector<uint64_t> pi( n.inputs.size() );
  for ( std::size_t i = 0; i < n.inputs.size(); ++i )
  {
    auto it = stimulus.find( n.net_name( n.inputs[i] ) );
    if ( it == stimulus.end() )
      throw std::invalid_argument( "missing binding for primary input " + n.net_name( n.inputs[i] ) );
    pi[i] = it->second ? 1u : 0u;
  }
  std::vector<uint64_t> values;
  Simulator( n ).run( pi, 1, values );
  Assignment out;
  for ( NetId id = 0; id < n.num_nets(); ++id )
    out.emplace( n.net_name( id ), values[id] & 1u );
  return out;
}

/// Primary-input assignment from bit `bit` of a packed pattern block.
inline Assignment pattern_assignment( Netlist const& n, std::span<uint64_t const> pi_words, std::size_t words,
                                      std::size_t bit )
{
  Assignment a;
  for ( std::size_t i = 0; i < n.inputs.size(); ++i )
    a.emplace( n.net_name( n.inputs[i] ), ( pi_words[i * words + bit / 64] >> ( bit % 64 ) ) & 1u );
  return a;
}

/* --------------------------------------------------------------------
 * Structural Verilog
 * ------------------------------------------------------------------ */

class ParseError : public std::runtime_error
{
public:
  ParseError( std::string const& what, std::size_t line, std::size_t column )
      : std::runtime_error( std::to_string( line ) + ":" + std::to_string( column ) + ": " + what ),
        line_( line ), column_( column ) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_, column_;
};

namespace detail
{

struct Token
{
  enum class Kind
  {
    identifier,
    number,
    constant,
    symbol,
    end
  };
  Kind kind;
  std::string text;
  std::size_t line, column;
};

class Lexer
{
public:
  explicit Lexer( std::string_view src ) : src_( src ) {}

  Token next()
  {
    skip_space();
    Token t{ Token::Kind::end, {}, line_, col_ };
    if ( pos_ >= src_.size() )
      return t;
    char const c = src_[pos_];
    if ( c == '\\' )
    {
      /* escaped identifier: everything up to the next whitespace */
      advance();
      auto const start = pos_;
      while ( pos_ < src_.size() && !std::isspace( static_cast<unsigned char>( src_[pos_] ) ) )
        advance();
      if ( pos_ == start )
        throw ParseError( "empty escaped identifier", t.line, t.column );
      t.kind = Token::Kind::identifier;
      t.text = std::string( src_.substr( start, pos_ - start ) );
      return t;
    }
    if ( std::isalpha( static_cast<unsigned char>( c ) ) || c == '_' )
    {
      auto const start = pos_;
      while ( pos_ < src_.size() && ( std::isalnum( static_cast<unsigned char>( src_[pos_] ) ) ||
                                      src_[pos_] == '_' || src_[pos_] == '$' ) )
        advance();
      t.kind = Token::Kind::identifier;
      t.text = std::string( src_.substr( start, pos_ - start ) );
      return t;
    }
    if ( std::isdigit( static_cast<unsigned char>( c ) ) )
    {
      auto const start = pos_;
      while ( pos_ < src_.size() && std::isdigit( static_cast<unsigned char>( src_[pos_] ) ) )
        advance();
      if ( pos_ < src_.size() && src_[pos_] == '\'' )
      {
        advance();
        while ( pos_ < src_.size() && ( std::isalnum( static_cast<unsigned char>( src_[pos_] ) ) ) )
          advance();
        t.kind = Token::Kind::constant;
        t.text = std::string( src_.substr( start, pos_ - start ) );
        return t;
      }
      t.kind = Token::Kind::number;
      t.text = std::string( src_.substr( start, pos_ - start ) );
      return t;
    }
    advance();
    t.kind = Token::Kind::symbol;
    t.text = std::string( 1, c );
    return t;
  }

private:
  void advance()
  {
    if ( src_[pos_] == '\n' )
    {
      ++line_;
      col_ = 1;
    }
    else
      ++col_;
    ++pos_;
  }

  void skip_space()
  {
    while ( pos_ < src_.size() )
    {
      char const c = src_[pos_];
      if ( std::isspace( static_cast<unsigned char>( c ) ) )
        advance();
      else if ( src_.substr( pos_, 2 ) == "//" || c == '`' )
      {
        /* line comments and compiler directives */
        while ( pos_ < src_.size() && src_[pos_] != '\n' )
          advance();
      }
      else if ( src_.substr( pos_, 2 ) == "/*" )
      {
        auto const l = line_, k = col_;
        advance();
        advance();
        while ( pos_ < src_.size() && src_.substr( pos_, 2 ) != "*/" )
          advance();
        if ( pos_ >= src_.size() )
          throw ParseError( "unterminated block comment", l, k );
        advance();
        advance();
      }
      else
        break;
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

inline bool is_behavioral_keyword( std::string_view s )
{
  for ( std::string_view k : { "always", "initial", "reg", "posedge", "negedge", "always_ff", "always_comb",
                               "always_latch", "function", "task", "generate", "if", "case", "begin" } )
    if ( s == k )
      return true;
  return false;
}

inline bool looks_sequential_cell( std::string_view s )
{
  std::string lower( s );
  for ( auto& ch : lower )
    ch = static_cast<char>( std::tolower( static_cast<unsigned char>( ch ) ) );
  return lower.find( "dff" ) != std::string::npos || lower.find( "latch" ) != std::string::npos ||
         lower.find( "flop" ) != std::string::npos;
}

class Parser
{
public:
  explicit Parser( std::string_view src ) : lex_( src ) { shift(); }

  Netlist run()
  {
    expect_keyword( "module" );
    Netlist n( expect_identifier( "module name" ) );

    std::vector<std::string> header_ports;
    if ( accept( "(" ) )
    {
      if ( !accept( ")" ) )
      {
        do
        {
          if ( tok_.kind == Token::Kind::identifier && ( tok_.text == "input" || tok_.text == "output" ) )
          {
            /* ANSI-style port declaration */
            auto const dir = tok_.text;
            shift();
            if ( tok_.kind == Token::Kind::identifier && tok_.text == "wire" )
              shift();
            auto const range = parse_range();
            auto const base = expect_identifier( "port name" );
            declare( dir, base, range );
            header_ports.push_back( base );
            while ( tok_.kind == Token::Kind::symbol && tok_.text == "," && peek_is_plain_identifier() )
            {
              shift();
              auto const more = expect_identifier( "port name" );
              declare( dir, more, range );
              header_ports.push_back( more );
            }
          }
          else
            header_ports.push_back( expect_identifier( "port name" ) );
        } while ( accept( "," ) );
        expect( ")" );
      }
    }
    expect( ";" );

    while ( !( tok_.kind == Token::Kind::identifier && tok_.text == "endmodule" ) )
    {
      if ( tok_.kind == Token::Kind::end )
        fail( "missing endmodule" );
      parse_item( n );
    }
    shift();
    if ( tok_.kind == Token::Kind::identifier && tok_.text == "module" )
      fail( "unsupported construct: multiple modules (flatten the hierarchy first)" );
    if ( tok_.kind != Token::Kind::end )
      fail( "unexpected text after endmodule" );

    /* ports follow the module header order; undeclared header ports are errors */
    auto order_ports = [&]( std::vector<std::string> const& declared_order, std::vector<NetId>& dst,
                            char const* dir ) {
      std::vector<std::string> order;
      if ( header_ports.empty() )
        order = declared_order;
      else
        for ( auto const& p : header_ports )
          if ( std::find( declared_order.begin(), declared_order.end(), p ) != declared_order.end() )
            order.push_back( p );
      for ( auto const& base : order )
        for ( auto const& bit : expansions_.at( base ) )
          dst.push_back( n.net( bit ) );
      (void)dir;
    };
    for ( auto const& p : header_ports )
      if ( !direction_.count( p ) )
        throw ParseError( "port " + p + " has no direction declaration", 1, 1 );
    order_ports( input_order_, n.inputs, "input" );
    order_ports( output_order_, n.outputs, "output" );

    /* declared nets get ids in declaration order before gate-implied nets */
    require_valid( n );
    return n;
  }

private:
  void shift() { tok_ = lex_.next(); }

  [[noreturn]] void fail( std::string const& what ) const { throw ParseError( what, tok_.line, tok_.column ); }

  bool accept( std::string_view sym )
  {
    if ( tok_.kind == Token::Kind::symbol && tok_.text == sym )
    {
      shift();
      return true;
    }
    return false;
  }

  void expect( std::string_view sym )
  {
    if ( !accept( sym ) )
      fail( "expected '" + std::string( sym ) + "' but found '" + tok_.text + "'" );
  }

  void expect_keyword( std::string_view kw )
  {
    if ( tok_.kind != Token::Kind::identifier || tok_.text != kw )
      fail( "expected '" + std::string( kw ) + "'" );
    shift();
  }

  std::string expect_identifier( char const* what )
  {
    if ( tok_.kind != Token::Kind::identifier )
      fail( std::string( "expected " ) + what );
    check_behavioral();
    auto s = tok_.text;
    shift();
    return s;
  }

  bool peek_is_plain_identifier()
  {
    /* after a ',' in an ANSI list: another name (not a new direction) */
    auto saved_lex = lex_;
    auto saved_tok = tok_;
    shift();
    bool const ok = tok_.kind == Token::Kind::identifier && tok_.text != "input" && tok_.text != "output";
    lex_ = saved_lex;
    tok_ = saved_tok;
    return ok;
  }

  void check_behavioral() const
  {
    if ( tok_.kind == Token::Kind::identifier && is_behavioral_keyword( tok_.text ) )
      fail( "unsupported sequential/behavioral construct '" + tok_.text + "'" );
  }

  std::optional<std::pair<long, long>> parse_range()
  {
    if ( !accept( "[" ) )
      return std::nullopt;
    auto const msb = parse_number();
    expect( ":" );
    auto const lsb = parse_number();
    expect( "]" );
    return std::make_pair( msb, lsb );
  }

  long parse_number()
  {
    if ( tok_.kind != Token::Kind::number )
      fail( "expected number" );
    auto const v = std::stol( tok_.text );
    shift();
    return v;
  }

  void declare( std::string const& dir, std::string const& base, std::optional<std::pair<long, long>> range )
  {
    std::vector<std::string> bits;
    if ( range )
    {
      auto const lo = std::min( range->first, range->second ), hi = std::max( range->first, range->second );
      for ( long i = lo; i <= hi; ++i )
        bits.push_back( base + "[" + std::to_string( i ) + "]" );
    }
    else
      bits.push_back( base );

    if ( dir == "wire" )
    {
      for ( auto const& b : bits )
        pending_wires_.push_back( b );
      expansions_.emplace( base, bits );
      return;
    }
    if ( direction_.count( base ) )
      fail( "port " + base + " declared twice" );
    direction_[base] = dir;
    expansions_[base] = bits;
    ( dir == "input" ? input_order_ : output_order_ ).push_back( base );
  }

  void parse_item( Netlist& n )
  {
    if ( tok_.kind != Token::Kind::identifier )
      fail( "unexpected '" + tok_.text + "'" );
    check_behavioral();
    auto const word = tok_.text;
    if ( word == "input" || word == "output" || word == "wire" )
    {
      shift();
      if ( tok_.kind == Token::Kind::identifier && tok_.text == "wire" )
        shift();
      auto const range = parse_range();
      do
      {
        auto const base = expect_identifier( "net name" );
        declare( word, base, range );
        for ( auto const& b : expansions_.at( base ) )
          n.net( b );
      } while ( accept( "," ) );
      expect( ";" );
      return;
    }
    if ( word == "assign" )
      fail( "unsupported construct 'assign' (only gate primitives are allowed)" );
    if ( word == "supply0" || word == "supply1" || word == "tri" || word == "wand" || word == "wor" )
      fail( "unsupported net type '" + word + "'" );

    auto const kind = gate_kind_from_string( word );
    if ( !kind )
    {
      if ( looks_sequential_cell( word ) )
        fail( "unsupported sequential/behavioral construct '" + word + "'" );
      fail( "unsupported construct: instantiation of '" + word + "'" );
    }
    shift();
    if ( accept( "#" ) )
    {
      /* gate delay, ignored */
      if ( accept( "(" ) )
      {
        while ( !accept( ")" ) )
        {
          if ( tok_.kind == Token::Kind::end )
            fail( "unterminated delay" );
          shift();
        }
      }
      else
        parse_number();
    }
    do
    {
      std::string instance;
      if ( tok_.kind == Token::Kind::identifier )
        instance = expect_identifier( "instance name" );
      else
        instance = "_u" + std::to_string( n.gates.size() );
      expect( "(" );
      std::vector<NetId> terms;
      do
        terms.push_back( parse_net_ref( n ) );
      while ( accept( "," ) );
      expect( ")" );
      if ( terms.size() < 2 )
        fail( "gate " + instance + " needs an output and at least one input" );
      auto const out = terms.front();
      terms.erase( terms.begin() );
      if ( n.is_constant( out ) )
        fail( "gate " + instance + " drives a constant" );
      n.gates.push_back( Gate{ *kind, std::move( terms ), out, instance } );
    } while ( accept( "," ) );
    expect( ";" );
  }

  NetId parse_net_ref( Netlist& n )
  {
    if ( tok_.kind == Token::Kind::constant )
    {
      auto const text = tok_.text;
      shift();
      auto const tick = text.find( '\'' );
      auto const base = text.substr( tick + 1 );
      if ( base == "b0" || base == "h0" || base == "d0" )
        return n.constant( false );
      if ( base == "b1" || base == "h1" || base == "d1" )
        return n.constant( true );
      fail( "unsupported literal " + text );
    }
    auto const name = expect_identifier( "net name" );
    if ( accept( "[" ) )
    {
      auto const index = parse_number();
      expect( "]" );
      return n.net( name + "[" + std::to_string( index ) + "]" );
    }
    if ( auto it = expansions_.find( name ); it != expansions_.end() && it->second.size() > 1 )
      fail( "vector net " + name + " used without bit select" );
    return n.net( name );
  }

  Lexer lex_;
  Token tok_;
  std::map<std::string, std::string> direction_;
  std::map<std::string, std::vector<std::string>> expansions_;
  std::vector<std::string> input_order_, output_order_, pending_wires_;
};

inline bool is_simple_identifier( std::string_view s )
{
  if ( s.empty() || !( std::isalpha( static_cast<unsigned char>( s[0] ) ) || s[0] == '_' ) )
    return false;
  for ( char c : s )
    if ( !( std::isalnum( static_cast<unsigned char>( c ) ) || c == '_' || c == '$' ) )
      return false;
  if ( gate_kind_from_string( s ) || is_behavioral_keyword( s ) )
    return false;
  for ( std::string_view k : { "module", "endmodule", "input", "output", "wire", "assign" } )
    if ( s == k )
      return false;
  return true;
}

inline std::string verilog_name( std::string const& s )
{
  return is_simple_identifier( s ) ? s : "\\" + s + " ";
}

} // namespace detail

/// Parses one module of the supported structural Verilog subset.
inline Netlist parse_netlist( std::string_view source )
{
  return detail::Parser( source ).run();
}

/// Serializes a valid netlist; gate order and port order are preserved.
inline std::string write_netlist( Netlist const& n )
{
  using detail::verilog_name;
  std::string out;
  out += "module " + verilog_name( n.name.empty() ? std::string( "top" ) : n.name ) + "(";
  bool first = true;
  for ( auto const* ports : { &n.inputs, &n.outputs } )
    for ( auto p : *ports )
    {
      out += ( first ? "" : ", " ) + verilog_name( n.net_name( p ) );
      first = false;
    }
  out += ");\n";

  auto declare = [&]( char const* keyword, std::vector<NetId> const& nets ) {
    for ( auto id : nets )
      out += std::string( "  " ) + keyword + " " + verilog_name( n.net_name( id ) ) + ";\n";
  };
  declare( "input", n.inputs );
  declare( "output", n.outputs );

  std::vector<uint8_t> is_port( n.num_nets(), 0 );
  for ( auto p : n.inputs )
    is_port[p] = 1;
  for ( auto p : n.outputs )
    is_port[p] = 1;
  std::vector<NetId> wires;
  std::vector<uint8_t> listed( n.num_nets(), 0 );
  auto consider = [&]( NetId id ) {
    if ( !is_port[id] && !n.is_constant( id ) && !listed[id] )
    {
      listed[id] = 1;
      wires.push_back( id );
    }
  };
  for ( auto const& g : n.gates )
  {
    consider( g.output );
    for ( auto in : g.inputs )
      consider( in );
  }
  declare( "wire", wires );

  for ( auto const& g : n.gates )
  {
    out += "  " + std::string( to_string( g.kind ) ) + " " + verilog_name( g.name ) + "(" +
           verilog_name( n.net_name( g.output ) );
    for ( auto in : g.inputs )
      out += ", " + ( n.is_constant( in ) ? n.net_name( in ) : verilog_name( n.net_name( in ) ) );
    out += ");\n";
  }
  out += "endmodule\n";
  return out;
}

/// Canonical JSON dump used by tooling.
inline nlohmann::json netlist_to_json( Netlist const& n )
{
  nlohmann::json j;
  j["module"] = n.name;
  auto names = [&]( std::vector<NetId> const& ids ) {
    auto arr = nlohmann::json::array();
    for ( auto id : ids )
      arr.push_back( n.net_name( id ) );
    return arr;
  };
  j["inputs"] = names( n.inputs );
  j["outputs"] = names( n.outputs );
  auto nets = nlohmann::json::array();
  auto const c = connectivity( n );
  for ( NetId id = 0; id < n.num_nets(); ++id )
  {
    nlohmann::json e{ { "id", id }, { "name", n.net_name( id ) } };
    if ( c.driver[id] >= 0 )
      e["driver"] = n.gates[c.driver[id]].name;
    else if ( c.driver[id] == driver_input )
      e["driver"] = "input";
    else if ( c.driver[id] == driver_constant )
      e["driver"] = "constant";
    else
      e["driver"] = nullptr;
    e["fanout"] = c.fanout[id].size();
    nets.push_back( e );
  }
  j["nets"] = nets;
  auto gates = nlohmann::json::array();
  for ( auto const& g : n.gates )
  {
    auto ins = nlohmann::json::array();
    for ( auto in : g.inputs )
      ins.push_back( n.net_name( in ) );
    gates.push_back( { { "name", g.name }, { "kind", to_string( g.kind ) }, { "output", n.net_name( g.output ) },
                       { "inputs", ins } } );
  }
  j["gates"] = gates;
  return j;
}

/* --------------------------------------------------------------------
 * Small helpers shared by the other modules
 * ------------------------------------------------------------------ */

/// Nets in the transitive fanin of `roots` (roots included).
inline std::vector<uint8_t> transitive_fanin( Netlist const& n, Connectivity const& c, std::span<NetId const> roots )
{
  std::vector<uint8_t> mark( n.num_nets(), 0 );
  std::vector<NetId> stack( roots.begin(), roots.end() );
  while ( !stack.empty() )
  {
    auto const id = stack.back();
    stack.pop_back();
    if ( mark[id] )
      continue;
    mark[id] = 1;
    if ( c.driver[id] >= 0 )
      for ( auto in : n.gates[c.driver[id]].inputs )
        stack.push_back( in );
  }
  return mark;
}

/// Nets in the transitive fanout of `root` (root included).
inline std::vector<uint8_t> transitive_fanout( Netlist const& n, Connectivity const& c, NetId root )
{
  std::vector<uint8_t> mark( n.num_nets(), 0 );
  std::vector<NetId> stack{ root };
  while ( !stack.empty() )
  {
    auto const id = stack.back();
    stack.pop_back();
    if ( mark[id] )
      continue;
    mark[id] = 1;
    for ( auto g : c.fanout[id] )
      stack.push_back( n.gates[g].output );
  }
  return mark;
}

/// Logic depth per net (inputs and constants at 0).
inline std::vector<uint32_t> net_levels( Netlist const& n, Connectivity const& c )
{
  std::vector<uint32_t> level( n.num_nets(), 0 );
  for ( auto g : c.order )
  {
    uint32_t l = 0;
    for ( auto in : n.gates[g].inputs )
      l = std::max( l, level[in] );
    level[n.gates[g].output] = l + 1;
  }
  return level;
}

} // namespace forge
