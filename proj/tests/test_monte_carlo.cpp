#include <sstream>

#include <gtest/gtest.h>

#include <pcmlogic/monte_carlo.hpp>

using namespace pcmlogic;

namespace
{

monte_carlo_params fast()
{
  monte_carlo_params p;
  p.circuit.gate.timing = pulse_timing::integrated();
  p.circuit.c_p = 10e-15;
  p.threads = 1;
  return p;
}

} // namespace

TEST( MonteCarlo, ZeroVariabilityAlwaysSucceeds )
{
  auto p = fast();
  p.variability = variability_spec::none();
  for ( auto k : all_gate_kinds )
  {
    auto const r = monte_carlo( k, 5, p );
    EXPECT_EQ( r.success_rate(), 1.0 );
    EXPECT_EQ( r.trials(), 20u );
    EXPECT_TRUE( r.all_passed() );
    EXPECT_EQ( r.scatter.size(), 20u * ( has_second_input( k ) ? 3u : 2u ) );
  }
}

TEST( MonteCarlo, StandardVariabilityPassesAtBothPresets )
{
  auto p = fast();
  for ( auto k : all_gate_kinds )
  {
    EXPECT_TRUE( monte_carlo( k, 10, p ).all_passed() ) << to_string( k );
  }
  monte_carlo_params bench;
  bench.threads = 1;
  EXPECT_TRUE( monte_carlo( gate_kind::OR, 5, bench ).all_passed() );
}

TEST( MonteCarlo, FailuresAreItemizedWithReproducingSeeds )
{
  auto p = fast();
  p.variability = variability_spec::none();
  p.nominal.v_th = 1.25;
  auto const r = monte_carlo( gate_kind::OR, 3, p );
  EXPECT_FALSE( r.all_passed() );
  EXPECT_LT( r.success_rate(), 1.0 );
  ASSERT_FALSE( r.failures.empty() );
  for ( auto const& f : r.failures )
  {
    EXPECT_EQ( f.seed, derive_seed( p.seed, { f.iteration, f.combination } ) );
    EXPECT_FALSE( f.reason.empty() );
    auto const again = detail::run_mc_trial( gate_kind::OR, r.combinations[f.combination].operands, f.seed, p );
    EXPECT_FALSE( again.ok );
  }
}

TEST( MonteCarlo, DeterministicAcrossThreadCounts )
{
  auto p = fast();
  auto const a = to_json( monte_carlo( gate_kind::NIMP, 6, p ) ).dump();
  p.threads = 3;
  auto const b = to_json( monte_carlo( gate_kind::NIMP, 6, p ) ).dump();
  EXPECT_EQ( a, b );
  p.seed = 2;
  EXPECT_NE( a, to_json( monte_carlo( gate_kind::NIMP, 6, p ) ).dump() );
}

TEST( MonteCarlo, RejectsZeroIterations ) { EXPECT_THROW( monte_carlo( gate_kind::NOR, 0, fast() ), error ); }

TEST( MonteCarlo, ExportSchemas )
{
  auto const r = monte_carlo( gate_kind::NOR, 4, fast() );
  auto const j = to_json( r );
  ASSERT_EQ( j["combinations"].size(), 4u );
  auto const& c = j["combinations"][0];
  EXPECT_EQ( c["successes"], 4 );
  EXPECT_EQ( c["trials"], 4 );
  std::ostringstream os;
  write_scatter_csv( os, r );
  auto const text = os.str();
  EXPECT_EQ( text.substr( 0, text.find( '\n' ) ), "iteration,cell,combination,resistance_ohm" );
  EXPECT_EQ( std::count( text.begin(), text.end(), '\n' ), 1 + 4 * 4 * 3 );
}
