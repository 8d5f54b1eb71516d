#include <array>
#include <set>

#include <gtest/gtest.h>

#include <pcmlogic/margins.hpp>

#include "oracle.hpp"

using namespace pcmlogic;
using pcmlogic::testing::divider_node_voltage;

namespace
{

/* worst-case V_OUT over band-edge corners for the given gate, from the bisection oracle */
struct oracle_margins
{
  double switching{ 1e9 };
  double non_switching{ 1e9 };
};

oracle_margins expected_margins( gate_kind k, double r_fix, double lrs, double hrs )
{
  double const v = 1.2;
  oracle_margins m;
  for ( int a = 0; a < 2; ++a )
  {
    for ( int b = 0; b < 2; ++b )
    {
      if ( k == gate_kind::IMPLY && b )
      {
        continue;
      }
      double const r1 = a ? lrs : hrs, r2 = b ? lrs : hrs;
      double v_out = 0.0;
      bool sw = false;
      switch ( k )
      {
      case gate_kind::NOR:
        v_out = v - divider_node_voltage( { { 0.6, r1 }, { 0.6, r2 }, { v, hrs } }, r_fix );
        sw = !a && !b;
        break;
      case gate_kind::IMPLY:
        v_out = v - divider_node_voltage( { { 0.6, r1 }, { v, hrs } }, r_fix );
        sw = !a;
        break;
      case gate_kind::OR:
        v_out = v - divider_node_voltage( { { 0.0, r1 }, { 0.0, r2 }, { v, hrs } }, std::nullopt );
        sw = a || b;
        break;
      case gate_kind::NIMP:
        v_out = divider_node_voltage( { { v, r1 }, { 0.35, r2 }, { 0.0, hrs } }, std::nullopt );
        sw = a && !b;
        break;
      }
      if ( sw )
      {
        m.switching = std::min( m.switching, v_out - 1.0 );
      }
      else
      {
        m.non_switching = std::min( m.non_switching, 1.0 - v_out );
      }
    }
  }
  return m;
}

} // namespace

TEST( Margins, MatchOracleAtReadBandEdges )
{
  for ( auto k : all_gate_kinds )
  {
    auto const m = worst_case_margins( make_gate_config( k ) );
    auto const o = expected_margins( k, 10e3, 10e3, 100e3 );
    EXPECT_NEAR( m.switching_margin, o.switching, 1e-9 ) << to_string( k );
    EXPECT_NEAR( m.non_switching_margin, o.non_switching, 1e-9 ) << to_string( k );
    EXPECT_TRUE( m.pass() ) << to_string( k );
  }
}

TEST( Margins, KnownValues )
{
  EXPECT_NEAR( worst_case_margins( make_gate_config( gate_kind::OR ) ).non_switching_margin, 0.2, 1e-9 );
  EXPECT_NEAR( worst_case_margins( make_gate_config( gate_kind::OR ) ).switching_margin, 0.1, 1e-9 );
  EXPECT_NEAR( worst_case_margins( make_gate_config( gate_kind::IMPLY ) ).switching_margin, 0.05, 1e-9 );
}

TEST( Margins, LargeFixedResistorBreaksNor )
{
  gate_params p;
  p.r_fix = 100e3;
  auto const m = worst_case_margins( make_gate_config( gate_kind::NOR, p ) );
  auto const o = expected_margins( gate_kind::NOR, 100e3, 10e3, 100e3 );
  EXPECT_NEAR( m.switching_margin, o.switching, 1e-9 );
  EXPECT_FALSE( m.pass() );
}

TEST( Margins, CornerCountFollowsBands )
{
  auto const point = worst_case_margins( make_gate_config( gate_kind::NOR ) );
  auto const wide = worst_case_margins( make_gate_config( gate_kind::NOR ), { 1e3, 10e3, 100e3, 1e6 } );
  auto const distinct = []( margin_report const& m ) {
    std::set<std::array<double, 3>> seen;
    for ( auto const& c : m.corners )
    {
      seen.insert( c.resistance );
    }
    return seen.size();
  };
  EXPECT_GT( distinct( wide ), distinct( point ) );
  EXPECT_LE( wide.switching_margin, point.switching_margin + 1e-12 );
  EXPECT_LE( wide.non_switching_margin, point.non_switching_margin + 1e-12 );
  EXPECT_THROW( worst_case_margins( make_gate_config( gate_kind::NOR ), { 10e3, 1e3, 100e3, 1e6 } ), error );
}

TEST( Margins, JsonCarriesVerdict )
{
  auto const j = to_json( worst_case_margins( make_gate_config( gate_kind::NIMP ) ) );
  EXPECT_EQ( j["gate"], "NIMP" );
  EXPECT_EQ( j["pass"], true );
}
