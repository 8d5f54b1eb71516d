#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <pcmlogic/compiler.hpp>

#include "random_netlist.hpp"

using namespace pcmlogic;
using pcmlogic::testing::random_netlist;

namespace
{

netlist sample( std::string const& name )
{
  std::ifstream in( std::string( PCMLOGIC_SAMPLES ) + "/" + name );
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_netlist( ss.str() );
}

circuit_params fast()
{
  circuit_params p;
  p.gate.timing = pulse_timing::integrated();
  p.c_p = 10e-15;
  return p;
}

/* replays a single-row program with ideal cells; every non-IMPLY gate must find its OUT at 0
 * unless the same cell was already written by a gate since its last Init */
bool init_discipline_holds( compiled_program const& cp, std::size_t inputs )
{
  for ( std::uint64_t v = 0; v < ( std::uint64_t{ 1 } << inputs ); ++v )
  {
    crossbar x( 1, std::max<std::size_t>( cp.stats.cells_used, 1 ) );
    for ( std::size_t i = 0; i < cp.listing.inputs.size(); ++i )
    {
      x.load( cp.listing.inputs[i].second, ( v >> i ) & 1u );
    }
    std::set<std::size_t> accumulated;
    for ( auto const& s : cp.listing.steps )
    {
      for ( auto const& op : s.ops )
      {
        auto const* g = std::get_if<gate_op>( &op );
        if ( !g || g->kind == gate_kind::IMPLY )
        {
          continue;
        }
        /* IMPLY overwrites its own operand; an accumulating second write into a cell is allowed only after a gate on the same cell */
        bool const fresh = accumulated.insert( g->out ).second;
        if ( fresh && x.level( { 0, g->out } ) != logic_level::zero )
        {
          return false;
        }
      }
      for ( auto const& op : s.ops )
      {
        if ( auto const* i = std::get_if<init_op>( &op ) )
        {
          for ( auto const& a : i->targets )
          {
            accumulated.erase( a.col );
          }
        }
      }
      execute_step( x, s, exec_mode::functional );
    }
  }
  return true;
}

} // namespace

TEST( Compiler, XorTakesTwoSteps )
{
  auto const cp = compile( sample( "xor.net" ), 16 );
  EXPECT_EQ( cp.stats.computation_steps, 2u );
  EXPECT_EQ( cp.stats.cells_used, 3u );
  EXPECT_EQ( cp.stats.init_ops, 1u );
  EXPECT_TRUE( verify_exhaustive( sample( "xor.net" ), cp ).pass() );
}

TEST( Compiler, PrimitiveStepCounts )
{
  auto const steps = []( std::string const& text ) { return compile( parse_netlist( text ), 16 ).stats.computation_steps; };
  EXPECT_EQ( steps( "inputs a; x = NOT(a); out x;" ), 1u );
  EXPECT_EQ( steps( "inputs a b; x = NOR(a, b); out x;" ), 1u );
  EXPECT_EQ( steps( "inputs a b; x = OR(a, b); out x;" ), 1u );
  EXPECT_EQ( steps( "inputs a b; x = NIMP(a, b); out x;" ), 1u );
  EXPECT_EQ( steps( "inputs a b; x = IMPLY(a, b); out x;" ), 1u );
  EXPECT_EQ( steps( "inputs a b; x = AND(a, b); out x;" ), 3u );
  EXPECT_EQ( steps( "inputs a b; x = NAND(a, b); out x;" ), 2u );
  EXPECT_EQ( steps( "inputs a b; x = XOR(a, b); out x a b;" ), 3u );
  EXPECT_EQ( steps( "inputs a; x = OR(a, a); out x;" ), 0u );
}

TEST( Compiler, SamplesVerifyInBothModes )
{
  for ( auto const* name : { "xor.net", "full_adder.net", "adder2.net" } )
  {
    auto const n = sample( name );
    auto const cp = compile( n, 16 );
    verify_options opt;
    EXPECT_TRUE( verify_exhaustive( n, cp, opt ).pass() ) << name;
    opt.mode = exec_mode::circuit;
    opt.circuit = fast();
    auto const r = verify_exhaustive( n, cp, opt );
    EXPECT_TRUE( r.pass() ) << name;
    EXPECT_EQ( r.vectors, std::size_t{ 1 } << n.inputs.size() );
  }
}

TEST( Compiler, RowOverflowReportsPeak )
{
  auto const n = sample( "full_adder.net" );
  auto const need = compile( n, 64 ).stats.cells_used;
  try
  {
    compile( n, need - 1 );
    FAIL();
  }
  catch ( row_overflow_error const& e )
  {
    EXPECT_EQ( e.code(), error_code::row_overflow );
    EXPECT_GE( e.peak(), need );
  }
  EXPECT_NO_THROW( compile( n, need ) );
}

TEST( Compiler, IoAllocation )
{
  auto const cp = compile( sample( "full_adder.net" ), 16 );
  ASSERT_EQ( cp.listing.inputs.size(), 3u );
  for ( std::size_t i = 0; i < 3; ++i )
  {
    EXPECT_EQ( cp.listing.inputs[i].second.col, i );
  }
  EXPECT_EQ( cp.allocation.at( "s" ), cp.listing.outputs[0].second );
  auto const j = to_json( cp );
  EXPECT_EQ( j["computation_steps"], cp.stats.computation_steps );
}

TEST( Compiler, CorruptedProgramIsCaught )
{
  auto const n = sample( "xor.net" );
  auto cp = compile( n, 16 );
  /* drop the second NIMP: only one of the two a != b vectors can still produce 1 */
  ASSERT_EQ( cp.listing.steps.back().gate_count(), 1u );
  cp.listing.steps.pop_back();
  auto const r = verify_exhaustive( n, cp );
  EXPECT_FALSE( r.pass() );
  ASSERT_EQ( r.mismatches.size(), 1u );
  EXPECT_NE( r.mismatches[0].inputs[0], r.mismatches[0].inputs[1] );
  EXPECT_EQ( to_json( r )["pass"], false );
}

TEST( Compiler, ScheduleRowsMergesIdenticalPrograms )
{
  auto const cp = compile( sample( "full_adder.net" ), 16 );
  std::vector<program_listing> rows;
  for ( std::size_t r = 0; r < 3; ++r )
  {
    rows.push_back( on_row( cp.listing, r ) );
  }
  auto const merged = schedule_rows( rows );
  EXPECT_EQ( merged.steps.size(), cp.listing.steps.size() );
  EXPECT_EQ( merged.inputs.size(), 9u );
  EXPECT_EQ( merged.inputs[3].first, "a@1" );
  for ( auto const& s : merged.steps )
  {
    EXPECT_NO_THROW( validate_step( s, 3, cp.stats.cells_used ) );
  }
  auto other = compile( sample( "xor.net" ), 16 ).listing;
  EXPECT_THROW( schedule_rows( { rows[0], on_row( other, 1 ) } ), error );
  EXPECT_THROW( schedule_rows( { rows[0], rows[0] } ), error );
}

/* ---- properties ---- */

TEST( CompilerProperty, RandomNetlistsMatchReference )
{
  for ( std::uint64_t s = 0; s < 150; ++s )
  {
    auto const n = random_netlist( derive_seed( 99, { s } ) );
    auto const cp = compile( n, 64 );
    auto const r = verify_exhaustive( n, cp );
    EXPECT_TRUE( r.pass() ) << format_netlist( n );
    EXPECT_TRUE( r.exhaustive );
    EXPECT_TRUE( init_discipline_holds( cp, n.inputs.size() ) ) << format_netlist( n );
  }
}

TEST( CompilerProperty, CircuitModeAgreesWithFunctional )
{
  for ( std::uint64_t s = 0; s < 6; ++s )
  {
    auto const n = random_netlist( derive_seed( 7, { s } ), 4, 10 );
    auto const cp = compile( n, 64 );
    verify_options opt;
    opt.mode = exec_mode::circuit;
    opt.circuit = fast();
    EXPECT_TRUE( verify_exhaustive( n, cp, opt ).pass() ) << format_netlist( n );
  }
}

TEST( CompilerProperty, ComputationStepsExcludeInit )
{
  for ( std::uint64_t s = 0; s < 50; ++s )
  {
    auto const n = random_netlist( derive_seed( 5, { s } ) );
    auto const cp = compile( n, 64 );
    std::size_t gates = 0, inits = 0;
    for ( auto const& step : cp.listing.steps )
    {
      gates += step.gate_count() > 0 ? 1u : 0u;
      inits += step.gate_count() == 0 ? 1u : 0u;
    }
    EXPECT_EQ( cp.stats.computation_steps, gates );
    EXPECT_EQ( cp.stats.init_ops, inits );
    crossbar x( 1, std::max<std::size_t>( cp.stats.cells_used, 1 ) );
    EXPECT_EQ( run_program( x, cp.listing.steps, exec_mode::functional ).computation_steps, gates );
  }
}

TEST( CompilerProperty, ScheduledProgramsSatisfyStepInvariants )
{
  for ( std::uint64_t s = 0; s < 30; ++s )
  {
    auto const n = random_netlist( derive_seed( 6, { s } ) );
    auto const cp = compile( n, 64 );
    std::vector<program_listing> rows;
    for ( std::size_t r = 0; r < 4; ++r )
    {
      rows.push_back( on_row( cp.listing, r ) );
    }
    for ( auto const& step : schedule_rows( rows ).steps )
    {
      EXPECT_NO_THROW( validate_step( step, 4, std::max<std::size_t>( cp.stats.cells_used, 1 ) ) );
    }
  }
}
