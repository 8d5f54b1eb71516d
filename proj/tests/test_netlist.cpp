#include <gtest/gtest.h>

#include <pcmlogic/netlist.hpp>

#include "random_netlist.hpp"

using namespace pcmlogic;

namespace
{

struct failure
{
  error_code code;
  std::size_t line;
  std::size_t column;
};

failure parse_failure( std::string const& text )
{
  try
  {
    parse_netlist( text );
  }
  catch ( parse_error const& e )
  {
    return { e.code(), e.line(), e.column() };
  }
  ADD_FAILURE() << "parsed without error: " << text;
  return { error_code::invalid_argument, 0, 0 };
}

} // namespace

TEST( Netlist, ParsesDocumentedExample )
{
  auto const n = parse_netlist( "inputs a b; x = NOR(a, b); out x;" );
  EXPECT_EQ( n.inputs, ( std::vector<std::string>{ "a", "b" } ) );
  ASSERT_EQ( n.assignments.size(), 1u );
  EXPECT_EQ( n.assignments[0].op, bool_op::NOR );
  EXPECT_EQ( n.outputs, std::vector<std::string>{ "x" } );
}

TEST( Netlist, CommentsAndLayout )
{
  auto const n = parse_netlist( "# adder\ninputs a b cin;\n\nt = XOR(a,b); # partial\ns = XOR(t, cin);\nout s t;\n" );
  EXPECT_EQ( n.assignments.size(), 2u );
  EXPECT_EQ( n.assignments[1].line, 5u );
  EXPECT_EQ( n.outputs.size(), 2u );
}

TEST( Netlist, ErrorsCarryCodeAndPosition )
{
  auto f = parse_failure( "inputs a b;\nx = NOR(a, c);\nout x;" );
  EXPECT_EQ( f.code, error_code::undefined_signal );
  EXPECT_EQ( f.line, 2u );
  EXPECT_EQ( f.column, 12u );

  f = parse_failure( "inputs a b;\nx = NOR(a, y);\ny = NOT(a);\nout x;" );
  EXPECT_EQ( f.code, error_code::undefined_signal );

  f = parse_failure( "inputs a;\nx = NOT(y);\ny = NOT(x);\nout x;" );
  EXPECT_EQ( f.code, error_code::cyclic_definition );

  f = parse_failure( "inputs a;\nx = NOT(x);\nout x;" );
  EXPECT_EQ( f.code, error_code::cyclic_definition );

  f = parse_failure( "inputs a a;\nout a;" );
  EXPECT_EQ( f.code, error_code::duplicate_name );
  EXPECT_EQ( f.column, 10u );

  f = parse_failure( "inputs a;\nx = NOT(a);\nx = NOT(a);\nout x;" );
  EXPECT_EQ( f.code, error_code::duplicate_name );
  EXPECT_EQ( f.line, 3u );

  f = parse_failure( "inputs a b;\nx = NOR(a b);\nout x;" );
  EXPECT_EQ( f.code, error_code::syntax_error );
  EXPECT_EQ( f.line, 2u );

  f = parse_failure( "inputs a b;\nx = MUX(a, b);\nout x;" );
  EXPECT_EQ( f.code, error_code::syntax_error );

  f = parse_failure( "inputs a b;\nx = NOT(a, b);\nout x;" );
  EXPECT_EQ( f.code, error_code::syntax_error );

  f = parse_failure( "inputs a;\nx = NOT(a)\nout x;" );
  EXPECT_EQ( f.code, error_code::syntax_error );
  EXPECT_EQ( f.line, 3u );

  f = parse_failure( "inputs a;\nx = NOT(a);\nout z;" );
  EXPECT_EQ( f.code, error_code::undefined_signal );

  f = parse_failure( "inputs a;\nx = NOT(a);\nout x x;" );
  EXPECT_EQ( f.code, error_code::duplicate_name );

  f = parse_failure( "inputs a $;" );
  EXPECT_EQ( f.code, error_code::syntax_error );
  EXPECT_EQ( f.column, 10u );
}

TEST( Netlist, ReferenceEvaluator )
{
  for ( auto op : all_bool_ops )
  {
    for ( int a = 0; a < 2; ++a )
    {
      for ( int b = 0; b < 2; ++b )
      {
        bool expected = false;
        switch ( op )
        {
        case bool_op::AND:   expected = a & b; break;
        case bool_op::OR:    expected = a | b; break;
        case bool_op::NOT:   expected = !a; break;
        case bool_op::NOR:   expected = !( a | b ); break;
        case bool_op::NAND:  expected = !( a & b ); break;
        case bool_op::XOR:   expected = a ^ b; break;
        case bool_op::NIMP:  expected = a & !b; break;
        case bool_op::IMPLY: expected = ( !a ) | b; break;
        }
        EXPECT_EQ( evaluate( op, a, b ), expected ) << to_string( op );
      }
    }
  }
  auto const fa = parse_netlist( "inputs a b c; t = XOR(a,b); s = XOR(t,c); g = AND(a,b); p = AND(t,c); co = OR(g,p); out s co;" );
  for ( int v = 0; v < 8; ++v )
  {
    bool const a = v & 1, b = v & 2, c = v & 4;
    auto const out = evaluate( fa, { a, b, c } );
    EXPECT_EQ( out[0], ( a + b + c ) % 2 == 1 );
    EXPECT_EQ( out[1], a + b + c >= 2 );
  }
  EXPECT_THROW( evaluate( fa, { true } ), error );
}

TEST( NetlistProperty, FormatParseRoundTrip )
{
  for ( std::uint64_t s = 0; s < 200; ++s )
  {
    auto const n = pcmlogic::testing::random_netlist( s );
    auto const text = format_netlist( n );
    auto const back = parse_netlist( text );
    EXPECT_EQ( back.inputs, n.inputs );
    EXPECT_EQ( back.outputs, n.outputs );
    ASSERT_EQ( back.assignments.size(), n.assignments.size() );
    for ( std::size_t i = 0; i < n.assignments.size(); ++i )
    {
      EXPECT_EQ( back.assignments[i].op, n.assignments[i].op );
      EXPECT_EQ( back.assignments[i].args, n.assignments[i].args );
    }
    EXPECT_EQ( format_netlist( back ), text );
  }
}
