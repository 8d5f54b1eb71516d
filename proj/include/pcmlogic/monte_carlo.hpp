/*!
  \file monte_carlo.hpp
  \brief Repeated gate evaluation on freshly sampled devices
*/

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "device.hpp"
#include "gates.hpp"
#include "utils.hpp"

namespace pcmlogic
{

struct monte_carlo_params
{
  circuit_params circuit{};
  device_params nominal{};
  variability_spec variability{ variability_spec::standard() };
  std::uint64_t seed{ 1 };
  int write_attempts{ 10 };
  double stability_tolerance{ 0.05 };
  write_params write{};
  /*! \brief worker threads, 0 = hardware concurrency */
  unsigned threads{ 0 };
};

struct mc_failure
{
  std::size_t iteration;
  std::size_t combination;
  /*! \brief seed that reproduces this (iteration, combination) trial */
  std::uint64_t seed;
  std::string reason;
};

struct mc_sample
{
  std::size_t iteration;
  std::size_t combination;
  terminal cell;
  double resistance;
};

struct combination_stats
{
  operand_combination operands;
  std::size_t successes{ 0 };
  std::size_t trials{ 0 };
};

struct robustness_report
{
  gate_kind kind;
  std::size_t iterations;
  std::uint64_t seed;
  std::vector<combination_stats> combinations;
  /*! \brief post-gate read resistance of every cell in every trial */
  std::vector<mc_sample> scatter;
  std::vector<mc_failure> failures;

  std::size_t successes() const
  {
    std::size_t s = 0;
    for ( auto const& c : combinations )
    {
      s += c.successes;
    }
    return s;
  }

  std::size_t trials() const { return iterations * combinations.size(); }

  double success_rate() const { return trials() == 0 ? 0.0 : static_cast<double>( successes() ) / static_cast<double>( trials() ); }

  bool all_passed() const { return failures.empty(); }
};

namespace detail
{

struct mc_trial
{
  bool ok{ false };
  std::string reason;
  std::array<double, 3> resistance{ 0.0, 0.0, 0.0 };
};

inline mc_trial run_mc_trial( gate_kind kind, operand_combination const& combo, std::uint64_t trial_seed,
                              monte_carlo_params const& params )
{
  mc_trial t;
  std::array<cell_state, 3> cells;
  std::array<bool, 3> const targets{ combo.in1, combo.in2.value_or( false ), combo.out_old };
  for ( std::size_t i = 0; i < 3; ++i )
  {
    auto const p = sample_device( params.nominal, params.variability, derive_seed( trial_seed, { i } ) );
    try
    {
      cells[i] = write_verify( make_cell( false, p ), targets[i], params.write_attempts, params.write ).cell;
    }
    catch ( error const& e )
    {
      t.reason = std::string( "write-verify of " ) + to_string( static_cast<terminal>( i ) ) + " failed (v_th = " +
                 std::to_string( p.v_th ) + " V)";
      for ( std::size_t j = 0; j < 3; ++j )
      {
        t.resistance[j] = j <= i ? read_resistance( j == i ? make_cell( false, p ) : cells[j] ) : 0.0;
      }
      return t;
    }
  }

  auto cp = params.circuit;
  cp.policy.record_samples = false;
  gate_result r;
  try
  {
    r = execute_gate_circuit( kind, cells, cp );
  }
  catch ( error const& e )
  {
    t.reason = e.what();
    return t;
  }
  t.resistance = r.r_post;

  bool const expected = execute_gate_functional( kind, combo.in1, combo.in2, combo.out_old );
  auto const want = expected ? logic_level::one : logic_level::zero;
  if ( r.output != want )
  {
    t.reason = std::string( "OUT read " ) + to_char( r.output ) + ", expected " + ( expected ? "1" : "0" );
    return t;
  }
  if ( !input_stability( r, params.stability_tolerance ) )
  {
    t.reason = "input disturbed (drift " + std::to_string( r.max_input_drift ) + ")";
    return t;
  }
  t.ok = true;
  return t;
}

} // namespace detail

/*! \brief Samples devices, write-verifies the operands and runs the circuit gate `iterations` times per combination.
 *
 * Trial (i, c) uses seed derive_seed(seed, {i, c}); the report is independent of thread scheduling.
 */
inline robustness_report monte_carlo( gate_kind kind, std::size_t iterations, monte_carlo_params const& params )
{
  if ( iterations < 1 )
  {
    throw error( error_code::invalid_argument, "at least one iteration is required" );
  }
  auto const combos = operand_combinations( kind );
  std::size_t const n = iterations * combos.size();
  std::vector<detail::mc_trial> trials( n );

  parallel_for(
      n,
      [&]( std::size_t k ) {
        auto const it = k / combos.size();
        auto const c = k % combos.size();
        trials[k] = detail::run_mc_trial( kind, combos[c], derive_seed( params.seed, { it, c } ), params );
      },
      params.threads );

  robustness_report report{ kind, iterations, params.seed, {}, {}, {} };
  for ( auto const& c : combos )
  {
    report.combinations.push_back( { c, 0, 0 } );
  }
  for ( std::size_t k = 0; k < n; ++k )
  {
    auto const it = k / combos.size();
    auto const c = k % combos.size();
    auto& stats = report.combinations[c];
    ++stats.trials;
    if ( trials[k].ok )
    {
      ++stats.successes;
    }
    else
    {
      report.failures.push_back( { it, c, derive_seed( params.seed, { it, c } ), trials[k].reason } );
    }
    for ( std::size_t cell = 0; cell < 3; ++cell )
    {
      if ( cell == index( terminal::in2 ) && !has_second_input( kind ) )
      {
        continue;
      }
      report.scatter.push_back( { it, c, static_cast<terminal>( cell ), trials[k].resistance[cell] } );
    }
  }
  return report;
}

namespace detail
{
/* linear interpolation between order statistics */
inline double quantile( std::vector<double> v, double q )
{
  if ( v.empty() )
  {
    return 0.0;
  }
  std::sort( v.begin(), v.end() );
  double const pos = q * static_cast<double>( v.size() - 1 );
  auto const lo = static_cast<std::size_t>( pos );
  auto const hi = std::min( lo + 1, v.size() - 1 );
  return v[lo] + ( v[hi] - v[lo] ) * ( pos - static_cast<double>( lo ) );
}
} // namespace detail

inline nlohmann::ordered_json to_json( robustness_report const& report )
{
  nlohmann::ordered_json j;
  j["gate"] = to_string( report.kind );
  j["iterations"] = report.iterations;
  j["seed"] = report.seed;
  j["success_rate"] = report.success_rate();
  auto& combos = j["combinations"] = nlohmann::ordered_json::array();
  for ( std::size_t c = 0; c < report.combinations.size(); ++c )
  {
    auto const& stats = report.combinations[c];
    nlohmann::ordered_json jc;
    jc["operands"] = stats.operands.label();
    jc["successes"] = stats.successes;
    jc["trials"] = stats.trials;
    auto& cells = jc["resistance_quartiles"] = nlohmann::ordered_json::object();
    for ( auto t : { terminal::in1, terminal::in2, terminal::out } )
    {
      std::vector<double> rs;
      for ( auto const& s : report.scatter )
      {
        if ( s.combination == c && s.cell == t )
        {
          rs.push_back( s.resistance );
        }
      }
      if ( rs.empty() )
      {
        continue;
      }
      cells[to_string( t )] = { detail::quantile( rs, 0.0 ), detail::quantile( rs, 0.25 ), detail::quantile( rs, 0.5 ),
                                detail::quantile( rs, 0.75 ), detail::quantile( rs, 1.0 ) };
    }
    combos.push_back( std::move( jc ) );
  }
  auto& fails = j["failures"] = nlohmann::ordered_json::array();
  for ( auto const& f : report.failures )
  {
    fails.push_back( { { "iteration", f.iteration },
                       { "operands", report.combinations[f.combination].operands.label() },
                       { "seed", f.seed },
                       { "reason", f.reason } } );
  }
  return j;
}

/*! \brief CSV with columns iteration,cell,combination,resistance_ohm */
inline void write_scatter_csv( std::ostream& os, robustness_report const& report )
{
  os << "iteration,cell,combination,resistance_ohm\n";
  char buf[64];
  for ( auto const& s : report.scatter )
  {
    std::snprintf( buf, sizeof( buf ), "%.9g", s.resistance );
    os << s.iteration << ',' << to_string( s.cell ) << ',' << report.combinations[s.combination].operands.label() << ','
       << buf << '\n';
  }
}

} // namespace pcmlogic
