/*!
  \file netlist.hpp
  \brief Boolean netlist text format, parser and reference evaluator
*/

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace pcmlogic
{

enum class bool_op : std::uint8_t
{
  AND,
  OR,
  NOT,
  NOR,
  NAND,
  XOR,
  NIMP,
  IMPLY
};

inline constexpr std::array<bool_op, 8> all_bool_ops{ bool_op::AND,  bool_op::OR,  bool_op::NOT,  bool_op::NOR,
                                                      bool_op::NAND, bool_op::XOR, bool_op::NIMP, bool_op::IMPLY };

inline std::string_view to_string( bool_op op )
{
  switch ( op )
  {
  case bool_op::AND:   return "AND";
  case bool_op::OR:    return "OR";
  case bool_op::NOT:   return "NOT";
  case bool_op::NOR:   return "NOR";
  case bool_op::NAND:  return "NAND";
  case bool_op::XOR:   return "XOR";
  case bool_op::NIMP:  return "NIMP";
  case bool_op::IMPLY: return "IMPLY";
  }
  return "?";
}

inline std::optional<bool_op> parse_bool_op( std::string_view s )
{
  for ( auto op : all_bool_ops )
  {
    if ( to_string( op ) == s )
    {
      return op;
    }
  }
  return std::nullopt;
}

constexpr std::size_t arity( bool_op op ) noexcept { return op == bool_op::NOT ? 1 : 2; }

/*! \brief IMPLY(a, b) is (not a) or b; NIMP(a, b) is a and not b */
inline bool evaluate( bool_op op, bool a, bool b = false )
{
  switch ( op )
  {
  case bool_op::AND:   return a && b;
  case bool_op::OR:    return a || b;
  case bool_op::NOT:   return !a;
  case bool_op::NOR:   return !( a || b );
  case bool_op::NAND:  return !( a && b );
  case bool_op::XOR:   return a != b;
  case bool_op::NIMP:  return a && !b;
  case bool_op::IMPLY: return !a || b;
  }
  return false;
}

struct assignment
{
  std::string name;
  bool_op op;
  std::vector<std::string> args;
  std::size_t line{ 0 };
};

struct netlist
{
  std::vector<std::string> inputs;
  std::vector<assignment> assignments;
  std::vector<std::string> outputs;
};

namespace detail
{

struct netlist_token
{
  enum kind_t
  {
    ident,
    punct,
    end
  } kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

inline std::vector<netlist_token> tokenize_netlist( std::string_view text )
{
  std::vector<netlist_token> tokens;
  std::size_t line = 1, col = 1;
  for ( std::size_t i = 0; i < text.size(); )
  {
    char const c = text[i];
    if ( c == '\n' )
    {
      ++line;
      col = 1;
      ++i;
    }
    else if ( std::isspace( static_cast<unsigned char>( c ) ) )
    {
      ++col;
      ++i;
    }
    else if ( c == '#' )
    {
      while ( i < text.size() && text[i] != '\n' )
      {
        ++i;
      }
    }
    else if ( std::isalpha( static_cast<unsigned char>( c ) ) || c == '_' )
    {
      auto const start = i;
      auto const start_col = col;
      while ( i < text.size() && ( std::isalnum( static_cast<unsigned char>( text[i] ) ) || text[i] == '_' ) )
      {
        ++i;
        ++col;
      }
      tokens.push_back( { netlist_token::ident, std::string( text.substr( start, i - start ) ), line, start_col } );
    }
    else if ( c == ';' || c == '=' || c == '(' || c == ')' || c == ',' )
    {
      tokens.push_back( { netlist_token::punct, std::string( 1, c ), line, col } );
      ++i;
      ++col;
    }
    else
    {
      throw parse_error( error_code::syntax_error, line, col, std::string( "unexpected character '" ) + c + "'" );
    }
  }
  tokens.push_back( { netlist_token::end, "", line, col } );
  return tokens;
}

} // namespace detail

/*! \brief Parses `inputs a b; x = NOR(a, b); out x;`.
 *
 * Statements end with `;`, `#` starts a comment. Errors report line and column.
 */
inline netlist parse_netlist( std::string_view text )
{
  using detail::netlist_token;
  auto const tokens = detail::tokenize_netlist( text );
  std::size_t pos = 0;
  auto const fail = [&]( netlist_token const& t, std::string const& msg ) -> void {
    throw parse_error( error_code::syntax_error, t.line, t.column, msg );
  };
  auto const expect = [&]( std::string const& p ) {
    if ( tokens[pos].kind != netlist_token::punct || tokens[pos].text != p )
    {
      fail( tokens[pos], "expected '" + p + "'" + ( tokens[pos].kind == netlist_token::end ? " before end of input" : "" ) );
    }
    ++pos;
  };
  auto const ident = [&]() -> netlist_token const& {
    if ( tokens[pos].kind != netlist_token::ident )
    {
      fail( tokens[pos], "expected a name" );
    }
    return tokens[pos++];
  };

  netlist n;
  struct def_site
  {
    std::size_t line, column;
  };
  std::map<std::string, def_site> defined;
  std::vector<std::vector<netlist_token>> arg_tokens;
  std::vector<netlist_token> output_tokens;

  auto const define = [&]( netlist_token const& t ) {
    if ( parse_bool_op( t.text ) || t.text == "inputs" || t.text == "out" )
    {
      throw parse_error( error_code::syntax_error, t.line, t.column, "'" + t.text + "' is a reserved word" );
    }
    if ( auto it = defined.find( t.text ); it != defined.end() )
    {
      throw parse_error( error_code::duplicate_name, t.line, t.column,
                         "'" + t.text + "' already defined at line " + std::to_string( it->second.line ) );
    }
    defined[t.text] = { t.line, t.column };
  };

  while ( tokens[pos].kind != netlist_token::end )
  {
    auto const& head = ident();
    if ( head.text == "inputs" )
    {
      while ( tokens[pos].kind == netlist_token::ident )
      {
        define( tokens[pos] );
        n.inputs.push_back( tokens[pos++].text );
      }
      expect( ";" );
    }
    else if ( head.text == "out" )
    {
      while ( tokens[pos].kind == netlist_token::ident )
      {
        output_tokens.push_back( tokens[pos] );
        n.outputs.push_back( tokens[pos++].text );
      }
      expect( ";" );
    }
    else
    {
      expect( "=" );
      auto const& op_tok = ident();
      auto const op = parse_bool_op( op_tok.text );
      if ( !op )
      {
        fail( op_tok, "unknown operator '" + op_tok.text + "'" );
      }
      expect( "(" );
      std::vector<netlist_token> args{ ident() };
      while ( tokens[pos].kind == netlist_token::punct && tokens[pos].text == "," )
      {
        ++pos;
        args.push_back( ident() );
      }
      expect( ")" );
      if ( args.size() != arity( *op ) )
      {
        fail( op_tok, std::string( to_string( *op ) ) + " takes " + std::to_string( arity( *op ) ) + " argument(s)" );
      }
      expect( ";" );
      define( head );
      assignment a{ head.text, *op, {}, head.line };
      for ( auto const& t : args )
      {
        a.args.push_back( t.text );
      }
      n.assignments.push_back( std::move( a ) );
      arg_tokens.push_back( std::move( args ) );
    }
  }

  /* cycles first, so a self-referencing definition is not reported as a forward reference */
  std::map<std::string, std::size_t> index_of;
  for ( std::size_t i = 0; i < n.assignments.size(); ++i )
  {
    index_of[n.assignments[i].name] = i;
  }
  std::vector<int> color( n.assignments.size(), 0 );
  std::function<void( std::size_t )> visit = [&]( std::size_t i ) {
    color[i] = 1;
    for ( std::size_t k = 0; k < arg_tokens[i].size(); ++k )
    {
      auto it = index_of.find( arg_tokens[i][k].text );
      if ( it == index_of.end() )
      {
        continue;
      }
      if ( color[it->second] == 1 )
      {
        auto const& t = arg_tokens[i][k];
        throw parse_error( error_code::cyclic_definition, t.line, t.column,
                           "'" + n.assignments[i].name + "' depends on itself through '" + t.text + "'" );
      }
      if ( color[it->second] == 0 )
      {
        visit( it->second );
      }
    }
    color[i] = 2;
  };
  for ( std::size_t i = 0; i < n.assignments.size(); ++i )
  {
    if ( color[i] == 0 )
    {
      visit( i );
    }
  }

  std::set<std::string> available( n.inputs.begin(), n.inputs.end() );
  for ( std::size_t i = 0; i < n.assignments.size(); ++i )
  {
    for ( auto const& t : arg_tokens[i] )
    {
      if ( !available.count( t.text ) )
      {
        throw parse_error( error_code::undefined_signal, t.line, t.column,
                           "'" + t.text + "' " + ( defined.count( t.text ) ? "used before its definition" : "is not defined" ) );
      }
    }
    available.insert( n.assignments[i].name );
  }
  std::set<std::string> seen_out;
  for ( auto const& t : output_tokens )
  {
    if ( !available.count( t.text ) )
    {
      throw parse_error( error_code::undefined_signal, t.line, t.column, "output '" + t.text + "' is not defined" );
    }
    if ( !seen_out.insert( t.text ).second )
    {
      throw parse_error( error_code::duplicate_name, t.line, t.column, "output '" + t.text + "' listed twice" );
    }
  }
  return n;
}

inline std::string format_netlist( netlist const& n )
{
  std::ostringstream os;
  os << "inputs";
  for ( auto const& i : n.inputs )
  {
    os << ' ' << i;
  }
  os << ";\n";
  for ( auto const& a : n.assignments )
  {
    os << a.name << " = " << to_string( a.op ) << '(';
    for ( std::size_t k = 0; k < a.args.size(); ++k )
    {
      os << ( k ? ", " : "" ) << a.args[k];
    }
    os << ");\n";
  }
  os << "out";
  for ( auto const& o : n.outputs )
  {
    os << ' ' << o;
  }
  os << ";\n";
  return os.str();
}

/*! \brief Reference evaluation; `inputs[i]` is the value of netlist.inputs[i]. Returns outputs in declared order. */
inline std::vector<bool> evaluate( netlist const& n, std::vector<bool> const& inputs )
{
  if ( inputs.size() != n.inputs.size() )
  {
    throw error( error_code::invalid_argument, "expected " + std::to_string( n.inputs.size() ) + " input values" );
  }
  std::map<std::string, bool> v;
  for ( std::size_t i = 0; i < inputs.size(); ++i )
  {
    v[n.inputs[i]] = inputs[i];
  }
  for ( auto const& a : n.assignments )
  {
    v[a.name] = evaluate( a.op, v.at( a.args[0] ), a.args.size() > 1 ? v.at( a.args[1] ) : false );
  }
  std::vector<bool> out;
  for ( auto const& o : n.outputs )
  {
    out.push_back( v.at( o ) );
  }
  return out;
}

} // namespace pcmlogic
