#pragma once

// Reference computations used by the tests, written without the library's solver.

#include <cmath>
#include <optional>
#include <vector>

namespace pcmlogic::testing
{

/* One resistor from a source (or open) to the shared node. */
struct divider_branch
{
  std::optional<double> source_volts;
  double ohms;
};

/* Node voltage where the sum of currents into the node vanishes, found by bisection.
 * `ground_ohms` is an optional resistor from the node to ground. */
inline double divider_node_voltage( std::vector<divider_branch> const& branches, std::optional<double> ground_ohms )
{
  auto const net_current_in = [&]( double v ) {
    double i = 0.0;
    for ( auto const& b : branches )
    {
      if ( b.source_volts )
      {
        i += ( *b.source_volts - v ) / b.ohms;
      }
    }
    if ( ground_ohms )
    {
      i -= v / *ground_ohms;
    }
    return i;
  };
  double lo = -1e3, hi = 1e3;
  for ( auto const& b : branches )
  {
    if ( b.source_volts )
    {
      lo = std::min( lo, *b.source_volts );
      hi = std::max( hi, *b.source_volts );
    }
  }
  /* current into the node decreases monotonically with v */
  for ( int k = 0; k < 200 && hi - lo > 0.0; ++k )
  {
    double const mid = 0.5 * ( lo + hi );
    if ( mid == lo || mid == hi )
    {
      break;
    }
    ( net_current_in( mid ) > 0.0 ? lo : hi ) = mid;
  }
  return 0.5 * ( lo + hi );
}

inline bool relative_close( double a, double b, double rel )
{
  return std::abs( a - b ) <= rel * std::max( std::abs( a ), std::abs( b ) );
}

} // namespace pcmlogic::testing
