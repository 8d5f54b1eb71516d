/*!
  \file characterize.hpp
  \brief Single-cell pulse sweeps, set transient and set/reset cycling
*/

#pragma once

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "device.hpp"
#include "errors.hpp"
#include "gates.hpp"

namespace pcmlogic
{

/*! \brief Cycle count from which endurance is reported as exhausted */
inline constexpr std::uint64_t endurance_warning_cycles = 10000;

struct sweep_point
{
  double amplitude;
  double resistance;
  logic_level level;
};

struct sweep_params
{
  double start{ 0.0 };
  double stop{ 2.0 };
  double increment{ 0.05 };
  /*! \brief pulse shape at unit amplitude: rise, width, fall */
  double rise{ 30e-9 };
  double width{ 500e-9 };
  double fall{ 500e-9 };
  double dt{ 1e-9 };

  static sweep_params set_sweep() { return {}; }
  static sweep_params reset_sweep() { return { 0.0, 4.0, 0.1, 30e-9, 50e-9, 30e-9, 1e-9 }; }
};

/*! \brief For each amplitude, one pulse on a fresh cell in the given start state, then a read. */
inline std::vector<sweep_point> pulse_sweep( device_params const& device, bool start_bit, sweep_params const& s )
{
  if ( !( s.increment > 0.0 ) || s.stop < s.start )
  {
    throw error( error_code::invalid_argument, "sweep needs a positive increment and stop >= start" );
  }
  std::vector<sweep_point> points;
  auto const n = static_cast<std::size_t>( std::floor( ( s.stop - s.start ) / s.increment + 1e-9 ) );
  for ( std::size_t k = 0; k <= n; ++k )
  {
    double const amp = s.start + static_cast<double>( k ) * s.increment;
    auto cell = make_cell( start_bit, device );
    if ( amp > 0.0 )
    {
      cell = apply_pulse( cell, pulse_waveform::trapezoid( s.rise, s.width, s.fall, amp ), s.dt ).state;
    }
    points.push_back( { amp, read_resistance( cell ), read_logic( cell ) } );
  }
  return points;
}

/*! \brief Lowest amplitude whose read differs from the start state, if any */
inline std::optional<double> transition_amplitude( std::vector<sweep_point> const& sweep )
{
  if ( sweep.empty() )
  {
    return std::nullopt;
  }
  for ( auto const& p : sweep )
  {
    if ( p.level != sweep.front().level )
    {
      return p.amplitude;
    }
  }
  return std::nullopt;
}

inline void write_sweep_csv( std::ostream& os, std::vector<sweep_point> const& sweep )
{
  os << "amplitude_V,resistance_ohm,logic\n";
  char buf[96];
  for ( auto const& p : sweep )
  {
    std::snprintf( buf, sizeof( buf ), "%.6g,%.9g,%c\n", p.amplitude, p.resistance, to_char( p.level ) );
    os << buf;
  }
}

struct transient_sample
{
  double time;
  double voltage;
  double current;
  double resistance;
};

/*! \brief Cell voltage, current and read resistance while a set pulse is applied directly across an amorphous cell */
inline std::vector<transient_sample> set_transient( device_params const& device, pulse_waveform const& pulse, double dt = 1e-9 )
{
  auto s = make_cell( false, device );
  std::vector<transient_sample> out{ { 0.0, 0.0, 0.0, read_resistance( s ) } };
  auto const n = static_cast<std::size_t>( std::ceil( pulse.duration() / dt - 1e-9 ) );
  double const h = pulse.duration() / static_cast<double>( n );
  for ( std::size_t k = 1; k <= n; ++k )
  {
    double const t = static_cast<double>( k ) * h;
    double const v = pulse( t );
    s = step( s, v, h ).state;
    auto const b = branch_of( s );
    out.push_back( { t, v, b.g * ( v - b.offset ), read_resistance( s ) } );
  }
  return out;
}

inline void write_transient_csv( std::ostream& os, std::vector<transient_sample> const& samples )
{
  os << "time_s,v_cell_V,current_A,resistance_ohm\n";
  char buf[128];
  for ( auto const& p : samples )
  {
    std::snprintf( buf, sizeof( buf ), "%.9g,%.9g,%.9g,%.9g\n", p.time, p.voltage, p.current, p.resistance );
    os << buf;
  }
}

struct endurance_report
{
  std::uint64_t cycles{ 0 };
  std::uint64_t switch_count{ 0 };
  /*! \brief cycles whose set or reset read back the wrong value */
  std::uint64_t failed_cycles{ 0 };
  bool warning{ false };
};

/*! \brief Alternating set and reset pulses on one cell; a cycle is one set followed by one reset */
inline endurance_report endurance_run( device_params const& device, std::uint64_t cycles, write_params const& w = {} )
{
  endurance_report r;
  r.cycles = cycles;
  auto cell = make_cell( false, device );
  for ( std::uint64_t c = 0; c < cycles; ++c )
  {
    cell = apply_pulse( cell, w.set_pulse, w.dt ).state;
    bool ok = read_logic( cell ) == logic_level::one;
    cell = apply_pulse( cell, w.reset_pulse, w.dt ).state;
    ok = ok && read_logic( cell ) == logic_level::zero;
    r.failed_cycles += ok ? 0u : 1u;
  }
  r.switch_count = cell.switch_count;
  r.warning = r.switch_count >= endurance_warning_cycles;
  return r;
}

inline nlohmann::ordered_json to_json( endurance_report const& r )
{
  return { { "cycles", r.cycles },
           { "switch_count", r.switch_count },
           { "failed_cycles", r.failed_cycles },
           { "endurance_warning_threshold", endurance_warning_cycles },
           { "warning", r.warning } };
}

} // namespace pcmlogic
