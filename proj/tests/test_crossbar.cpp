#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include <pcmlogic/crossbar.hpp>

using namespace pcmlogic;

namespace
{

circuit_params fast()
{
  circuit_params p;
  p.gate.timing = pulse_timing::integrated();
  p.c_p = 10e-15;
  return p;
}

program xor_program()
{
  return parse_program( "INIT 0,2\n---\nGATE NIMP row=0 in1=0 in2=1 out=2\n---\nGATE NIMP row=0 in1=1 in2=0 out=2\n" ).steps;
}

error_code code_of( auto&& fn )
{
  try
  {
    fn();
  }
  catch ( error const& e )
  {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return error_code::invalid_argument;
}

/* random program obeying the init discipline: every gate's OUT is initialized in the step before */
program random_program( std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::size_t gates )
{
  program p;
  for ( std::size_t k = 0; k < gates; ++k )
  {
    auto const kind = all_gate_kinds[rng() % 4];
    std::vector<std::size_t> perm( cols );
    std::iota( perm.begin(), perm.end(), 0 );
    std::shuffle( perm.begin(), perm.end(), rng );
    std::vector<std::size_t> used_rows;
    for ( std::size_t r = 0; r < rows; ++r )
    {
      if ( rng() % 3 )
      {
        used_rows.push_back( r );
      }
    }
    if ( used_rows.empty() )
    {
      used_rows.push_back( rng() % rows );
    }
    init_op init;
    array_step gate_step;
    for ( auto r : used_rows )
    {
      init.targets.push_back( { r, perm[2] } );
      gate_op g{ kind, r, perm[0], std::nullopt, perm[2] };
      if ( has_second_input( kind ) )
      {
        g.in2 = perm[1];
      }
      gate_step.ops.emplace_back( g );
    }
    p.push_back( { { init } } );
    p.push_back( gate_step );
  }
  return p;
}

crossbar random_array( std::mt19937_64& rng, std::size_t rows, std::size_t cols )
{
  crossbar x( rows, cols );
  for ( std::size_t r = 0; r < rows; ++r )
  {
    for ( std::size_t c = 0; c < cols; ++c )
    {
      x.load( { r, c }, rng() & 1u );
    }
  }
  return x;
}

} // namespace

TEST( Crossbar, ConstructionAndAccess )
{
  EXPECT_THROW( crossbar( 0, 3 ), error );
  crossbar x( 2, 3 );
  EXPECT_EQ( x.level( { 1, 2 } ), logic_level::zero );
  x.load( { 1, 2 }, true );
  EXPECT_TRUE( x.read( { 1, 2 } ) );
  EXPECT_EQ( x.total_switch_count(), 0u );
  x.write( { 0, 0 }, true );
  EXPECT_TRUE( x.read( { 0, 0 } ) );
  EXPECT_EQ( x.total_switch_count(), 1u );
  EXPECT_EQ( code_of( [&] { x.level( { 2, 0 } ); } ), error_code::invalid_argument );
}

TEST( Crossbar, CreateSamplesEachCell )
{
  auto const a = crossbar::create( 2, 2, {}, variability_spec::standard(), 9 );
  auto const b = crossbar::create( 2, 2, {}, variability_spec::standard(), 9 );
  EXPECT_EQ( a.cell( { 1, 1 } ), b.cell( { 1, 1 } ) );
  EXPECT_NE( a.cell( { 0, 0 } ).params, a.cell( { 0, 1 } ).params );
}

TEST( Crossbar, StepValidation )
{
  crossbar x( 2, 4 );
  auto const invalid = [&]( array_step const& s ) {
    EXPECT_EQ( code_of( [&] { execute_step( x, s, exec_mode::functional ); } ), error_code::invalid_step );
  };
  invalid( { { gate_op{ gate_kind::NOR, 0, 0, 1, 2 }, gate_op{ gate_kind::OR, 1, 0, 1, 2 } } } );
  invalid( { { gate_op{ gate_kind::NOR, 0, 0, 1, 2 }, gate_op{ gate_kind::NOR, 1, 0, 1, 3 } } } );
  invalid( { { gate_op{ gate_kind::NOR, 0, 0, 1, 2 }, gate_op{ gate_kind::NOR, 0, 0, 1, 2 } } } );
  invalid( { { gate_op{ gate_kind::NOR, 0, 0, 0, 2 } } } );
  invalid( { { gate_op{ gate_kind::NOR, 0, 0, 1, 4 } } } );
  invalid( { { gate_op{ gate_kind::NOR, 2, 0, 1, 3 } } } );
  invalid( { { gate_op{ gate_kind::IMPLY, 0, 0, 1, 2 } } } );
  invalid( { { gate_op{ gate_kind::NIMP, 0, 0, std::nullopt, 2 } } } );
  invalid( { { gate_op{ gate_kind::NOR, 0, 0, 1, 2 }, init_op{ { { 0, 2 } } } } } );
  invalid( { { init_op{ { { 5, 0 } } } } } );
  EXPECT_NO_THROW( execute_step( x, { { gate_op{ gate_kind::NOR, 0, 0, 1, 2 }, init_op{ { { 1, 2 }, { 0, 3 } } } } },
                                 exec_mode::functional ) );
}

TEST( Crossbar, PeripheralStateFollowsGate )
{
  crossbar x( 3, 5 );
  execute_step( x, { { gate_op{ gate_kind::NOR, 1, 0, 1, 2 } } }, exec_mode::functional );
  EXPECT_TRUE( x.row_resistor_attached( 1 ) );
  EXPECT_FALSE( x.row_resistor_attached( 0 ) );
  EXPECT_EQ( x.driver( 2 ), column_driver::driven );
  EXPECT_EQ( x.driver( 4 ), column_driver::floating );
  execute_step( x, { { gate_op{ gate_kind::OR, 0, 0, 1, 3 } } }, exec_mode::functional );
  EXPECT_FALSE( x.row_resistor_attached( 1 ) );
  EXPECT_EQ( x.driver( 0 ), column_driver::grounded );
}

TEST( Crossbar, StepIsTransactional )
{
  device_params mid;
  mid.r_hrs = 50e3;
  crossbar x( 1, 4, mid );
  auto const before = x.logic_map();
  auto const s = array_step{ { init_op{ { { 0, 3 } } }, gate_op{ gate_kind::NOR, 0, 0, 1, 2 } } };
  /* the reset never reaches the HRS band, so the init's verify loop gives up */
  EXPECT_EQ( code_of( [&] { execute_step( x, s, exec_mode::circuit, fast() ); } ), error_code::verify_failed );
  EXPECT_EQ( x.logic_map(), before );
  EXPECT_EQ( x.cell( { 0, 3 } ), make_cell( false, mid ) );
  auto const gate_only = array_step{ { gate_op{ gate_kind::NOR, 0, 0, 1, 2 } } };
  EXPECT_EQ( code_of( [&] { execute_step( x, gate_only, exec_mode::functional ); } ), error_code::indeterminate_state );
  EXPECT_EQ( x.logic_map(), before );
}

TEST( Crossbar, HandXorInBothModes )
{
  for ( auto mode : { exec_mode::functional, exec_mode::circuit } )
  {
    for ( int a = 0; a < 2; ++a )
    {
      for ( int b = 0; b < 2; ++b )
      {
        crossbar x( 1, 3 );
        x.load( { 0, 0 }, a );
        x.load( { 0, 1 }, b );
        x.load( { 0, 2 }, true );
        auto const r = run_program( x, xor_program(), mode, fast() );
        EXPECT_EQ( x.read( { 0, 2 } ), a != b );
        EXPECT_EQ( r.computation_steps, 2u );
        EXPECT_EQ( r.steps, 3u );
      }
    }
  }
}

TEST( Crossbar, SimdRowsComputeIndependently )
{
  crossbar x( 4, 3 );
  for ( std::size_t r = 0; r < 4; ++r )
  {
    x.load( { r, 0 }, r & 1u );
    x.load( { r, 1 }, r & 2u );
  }
  array_step s;
  for ( std::size_t r = 0; r < 4; ++r )
  {
    s.ops.emplace_back( gate_op{ gate_kind::NOR, r, 0, 1, 2 } );
  }
  for ( auto mode : { exec_mode::functional, exec_mode::circuit } )
  {
    auto y = x;
    auto const rep = execute_step( y, s, mode, fast() );
    EXPECT_EQ( rep.set_events, 1u );
    for ( std::size_t r = 0; r < 4; ++r )
    {
      EXPECT_EQ( y.read( { r, 2 } ), r == 0 );
    }
  }
}

TEST( Crossbar, ProgramTextRoundTrip )
{
  std::mt19937_64 rng( 31 );
  for ( int trial = 0; trial < 20; ++trial )
  {
    program_listing l;
    l.steps = random_program( rng, 3, 5, 4 );
    l.inputs = { { "a", { 0, 0 } }, { "b", { 1, 1 } } };
    l.outputs = { { "y", { 2, 4 } } };
    auto const text = format_program( l );
    auto const back = parse_program( text );
    EXPECT_EQ( back.steps, l.steps );
    EXPECT_EQ( back.inputs, l.inputs );
    EXPECT_EQ( back.outputs, l.outputs );
    EXPECT_EQ( format_program( back ), text );
  }
}

TEST( Crossbar, ProgramParseErrorsCarryLine )
{
  auto const line_of = []( std::string const& text ) {
    try
    {
      parse_program( text );
    }
    catch ( parse_error const& e )
    {
      EXPECT_EQ( e.code(), error_code::syntax_error );
      return e.line();
    }
    return std::size_t{ 0 };
  };
  EXPECT_EQ( line_of( "INIT 0,1\n---\nGATE XOR row=0 in1=0 in2=1 out=2\n" ), 3u );
  EXPECT_EQ( line_of( "# c\nGATE NOR row=0 in1=0 out=2\n" ), 2u );
  EXPECT_EQ( line_of( "INIT 0;1\n" ), 1u );
  EXPECT_EQ( line_of( "JUMP 3\n" ), 1u );
  EXPECT_EQ( line_of( "GATE NOR row=0 in1=0 in2=1 out=2 extra=1\n" ), 1u );
}

TEST( Crossbar, StateExports )
{
  crossbar x( 2, 2 );
  x.load( { 1, 0 }, true );
  std::ostringstream os;
  write_logic_csv( os, x );
  EXPECT_EQ( os.str(), "0,0\n1,0\n" );
  auto const j = resistances_json( x );
  EXPECT_EQ( j["resistance_ohm"][1][0], 5e3 );
  EXPECT_EQ( j["resistance_ohm"][0][1], 1e6 );
}

/* ---- properties ---- */

TEST( CrossbarProperty, FunctionalAndCircuitModesAgree )
{
  std::mt19937_64 rng( 32 );
  for ( int trial = 0; trial < 12; ++trial )
  {
    auto const x0 = random_array( rng, 3, 5 );
    auto const p = random_program( rng, 3, 5, 5 );
    auto f = x0, c = x0;
    run_program( f, p, exec_mode::functional );
    run_program( c, p, exec_mode::circuit, fast() );
    EXPECT_EQ( f.logic_map(), c.logic_map() ) << "trial " << trial;
  }
}

TEST( CrossbarProperty, RowIsolation )
{
  std::mt19937_64 rng( 33 );
  for ( int trial = 0; trial < 60; ++trial )
  {
    auto const x0 = random_array( rng, 4, 6 );
    auto const p = random_program( rng, 4, 6, 3 );
    auto const mode = trial % 6 == 0 ? exec_mode::circuit : exec_mode::functional;
    auto x = x0;
    for ( auto const& s : p )
    {
      auto const before = x;
      execute_step( x, s, mode, fast() );
      std::set<cell_address> touched;
      for ( auto const& op : s.ops )
      {
        if ( auto const* g = std::get_if<gate_op>( &op ) )
        {
          touched.insert( { g->row, g->in1 } );
          touched.insert( { g->row, g->out } );
          if ( g->in2 )
          {
            touched.insert( { g->row, *g->in2 } );
          }
        }
        else
        {
          for ( auto const& a : std::get<init_op>( op ).targets )
          {
            touched.insert( a );
          }
        }
      }
      for ( std::size_t r = 0; r < 4; ++r )
      {
        for ( std::size_t c = 0; c < 6; ++c )
        {
          if ( !touched.count( { r, c } ) )
          {
            EXPECT_EQ( x.cell( { r, c } ), before.cell( { r, c } ) );
          }
        }
      }
    }
  }
}

TEST( CrossbarProperty, RerunIsDeterministic )
{
  std::mt19937_64 rng( 34 );
  for ( int trial = 0; trial < 6; ++trial )
  {
    auto const x0 = random_array( rng, 2, 5 );
    auto const p = random_program( rng, 2, 5, 4 );
    for ( auto mode : { exec_mode::functional, exec_mode::circuit } )
    {
      auto a = x0, b = x0;
      run_program( a, p, mode, fast() );
      run_program( b, p, mode, fast() );
      EXPECT_EQ( a.logic_map(), b.logic_map() );
      EXPECT_EQ( resistances_json( a ).dump(), resistances_json( b ).dump() );
    }
  }
}

TEST( CrossbarProperty, SetEventsEqualSwitchCountIncrements )
{
  std::mt19937_64 rng( 35 );
  for ( int trial = 0; trial < 20; ++trial )
  {
    auto const mode = trial % 4 == 0 ? exec_mode::circuit : exec_mode::functional;
    auto x = random_array( rng, 3, 5 );
    auto const before = x.total_switch_count();
    auto const r = run_program( x, random_program( rng, 3, 5, 5 ), mode, fast() );
    std::size_t gate_sets = 0;
    for ( auto const& s : r.per_step )
    {
      gate_sets += s.set_events;
    }
    EXPECT_EQ( r.set_events, gate_sets );
    EXPECT_EQ( x.total_switch_count() - before, r.set_events );
  }
}
