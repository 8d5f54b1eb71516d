/*!
  \file device.hpp
  \brief Behavioral model of a confined phase-change memory cell

  The cell is a two-phase state machine. An amorphous cell whose voltage stays
  at or above `v_th` for `t_delay` enters the Ovonic ON state; while ON and
  driven above `v_hold` it accumulates crystallization time, and after
  `t_cryst` it becomes crystalline (a set event). Dropping below `v_hold`
  before that aborts the set and the cell returns to the plain amorphous
  state. Reset is a melt (|v| >= `v_reset` for `t_melt`) followed by a quench;
  a quench slower than `t_quench_max` recrystallizes the cell.

  Electrically the ON state is a holding voltage `v_hold` in series with
  `r_on`, which is what the nodal solver stamps via `cell_branch()`.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace pcmlogic
{

/*! \brief Physical parameters of one cell. Units: volts, ohms, seconds. */
struct device_params
{
  /*! \brief threshold-switching voltage */
  double v_th{ 1.0 };
  /*! \brief crystalline (set) resistance */
  double r_lrs{ 5e3 };
  /*! \brief amorphous (reset) resistance */
  double r_hrs{ 1e6 };
  /*! \brief dynamic ON-state resistance after threshold switching */
  double r_on{ 2e3 };
  /*! \brief holding voltage of the ON state */
  double v_hold{ 0.3 };
  /*! \brief dwell above v_th before the ON state is entered */
  double t_delay{ 100e-9 };
  /*! \brief cumulative ON time that completes crystallization */
  double t_cryst{ 400e-9 };
  /*! \brief cell voltage that melts the active region */
  double v_reset{ 2.5 };
  double t_melt{ 20e-9 };
  /*! \brief slowest melt-to-zero fall that still amorphizes */
  double t_quench_max{ 100e-9 };
  /*! \brief largest amplitude guaranteed not to disturb the cell */
  double v_read_max{ 0.2 };

  bool operator==( device_params const& ) const = default;

  bool valid() const noexcept
  {
    auto const positive = []( double x ) { return std::isfinite( x ) && x > 0.0; };
    return positive( r_on ) && positive( r_lrs ) && positive( r_hrs ) && r_on < r_lrs && r_lrs < r_hrs &&
           positive( v_hold ) && v_hold < v_th && v_th < v_reset && std::isfinite( v_reset ) &&
           positive( t_delay ) && positive( t_cryst ) && positive( t_melt ) && positive( t_quench_max ) &&
           std::isfinite( v_read_max ) && v_read_max < v_hold;
  }

  void validate() const
  {
    if ( !valid() )
    {
      throw error( error_code::invalid_argument,
                   "device parameters violate r_on < r_lrs < r_hrs, 0 < v_hold < v_th < v_reset, "
                   "v_read_max < v_hold or positive times" );
    }
  }
};

enum class cell_phase : std::uint8_t
{
  crystalline,
  amorphous
};

/*! \brief Dynamic state of one cell. */
struct cell_state
{
  cell_phase phase{ cell_phase::amorphous };
  /*! \brief Ovonic ON state active (only possible while amorphous) */
  bool dynamic_on{ false };
  /*! \brief ON time accumulated towards t_cryst; zero when crystalline */
  double cryst_progress{ 0.0 };
  /*! \brief number of set events seen by this cell (endurance counter) */
  std::uint64_t switch_count{ 0 };
  /*! \brief time spent continuously at or above v_th while OFF */
  double threshold_dwell{ 0.0 };
  /*! \brief sign of the cell voltage when the ON state was entered */
  std::int8_t on_polarity{ 1 };
  device_params params{};

  bool operator==( cell_state const& ) const = default;

  bool is_crystalline() const noexcept { return phase == cell_phase::crystalline; }
};

/*! \brief A fresh cell holding `bit` (1 = crystalline). */
inline cell_state make_cell( bool bit, device_params const& params = {} )
{
  cell_state s;
  s.phase = bit ? cell_phase::crystalline : cell_phase::amorphous;
  s.params = params;
  return s;
}

enum class switch_event_kind : std::uint8_t
{
  threshold,
  set
};

inline char const* to_string( switch_event_kind kind )
{
  return kind == switch_event_kind::threshold ? "threshold" : "set";
}

/*! \brief Small-signal conductance of the cell in its present state. */
inline double conductance( cell_state const& s ) noexcept
{
  if ( s.dynamic_on )
  {
    return 1.0 / s.params.r_on;
  }
  return s.is_crystalline() ? 1.0 / s.params.r_lrs : 1.0 / s.params.r_hrs;
}

/*! \brief Companion branch of a cell: current from TE to BE is g * (v_te - v_be - offset). */
struct cell_branch
{
  double g;
  double offset;
};

inline cell_branch branch_of( cell_state const& s ) noexcept
{
  return { conductance( s ), s.dynamic_on ? s.on_polarity * s.params.v_hold : 0.0 };
}

struct step_result
{
  cell_state state;
  std::optional<switch_event_kind> event;
};

namespace detail
{
/* relative slack so that n equal steps summing to t_delay or t_cryst complete on the n-th step */
inline constexpr double completion_slack = 1e-9;
} // namespace detail

/*! \brief Advances a cell by `dt` seconds at a constant cell voltage `v_across`.
 *
 * Requires 0 < dt <= t_delay / 4. At most one event is produced per call.
 */
inline step_result step( cell_state s, double v_across, double dt )
{
  auto const& p = s.params;
  if ( !( dt > 0.0 ) || dt > p.t_delay / 4.0 * ( 1.0 + detail::completion_slack ) )
  {
    throw error( error_code::resolution_too_coarse, "step dt must satisfy 0 < dt <= t_delay/4" );
  }

  if ( s.is_crystalline() )
  {
    return { s, std::nullopt };
  }

  double const mag = std::abs( v_across );
  if ( !s.dynamic_on )
  {
    if ( mag >= p.v_th )
    {
      s.threshold_dwell += dt;
      if ( s.threshold_dwell >= p.t_delay * ( 1.0 - detail::completion_slack ) )
      {
        s.dynamic_on = true;
        s.on_polarity = v_across < 0.0 ? -1 : 1;
        s.threshold_dwell = 0.0;
        return { s, switch_event_kind::threshold };
      }
    }
    else
    {
      s.threshold_dwell = 0.0;
    }
    return { s, std::nullopt };
  }

  if ( s.on_polarity * v_across >= p.v_hold )
  {
    s.cryst_progress += dt;
    if ( s.cryst_progress >= p.t_cryst * ( 1.0 - detail::completion_slack ) )
    {
      s.phase = cell_phase::crystalline;
      s.dynamic_on = false;
      s.cryst_progress = 0.0;
      ++s.switch_count;
      return { s, switch_event_kind::set };
    }
    return { s, std::nullopt };
  }

  /* incomplete set: back to the plain amorphous state */
  s.dynamic_on = false;
  s.cryst_progress = 0.0;
  return { s, std::nullopt };
}

/*! \brief Piecewise-linear voltage waveform starting and ending at 0 V. */
class pulse_waveform
{
public:
  struct segment
  {
    double duration;
    double end_voltage;

    bool operator==( segment const& ) const = default;
  };

  pulse_waveform() = default;

  explicit pulse_waveform( std::vector<segment> segments ) : segments_( std::move( segments ) )
  {
    double t = 0.0;
    starts_.reserve( segments_.size() );
    for ( auto const& s : segments_ )
    {
      if ( !( s.duration > 0.0 ) || !std::isfinite( s.duration ) || !std::isfinite( s.end_voltage ) )
      {
        throw error( error_code::invalid_argument, "waveform segment durations must be positive and finite" );
      }
      starts_.push_back( t );
      t += s.duration;
    }
    if ( !segments_.empty() && segments_.back().end_voltage != 0.0 )
    {
      throw error( error_code::invalid_argument, "waveform must end at 0 V" );
    }
    duration_ = t;
  }

  /*! \brief rise / width / fall trapezoid of the given amplitude */
  static pulse_waveform trapezoid( double rise, double width, double fall, double amplitude )
  {
    return pulse_waveform( { { rise, amplitude }, { width, amplitude }, { fall, 0.0 } } );
  }

  double operator()( double t ) const noexcept
  {
    if ( segments_.empty() || t <= 0.0 || t >= duration_ )
    {
      return 0.0;
    }
    auto const it = std::upper_bound( starts_.begin(), starts_.end(), t );
    auto const i = static_cast<std::size_t>( std::distance( starts_.begin(), it ) ) - 1u;
    double const v0 = i == 0 ? 0.0 : segments_[i - 1].end_voltage;
    double const frac = ( t - starts_[i] ) / segments_[i].duration;
    return v0 + ( segments_[i].end_voltage - v0 ) * frac;
  }

  double duration() const noexcept { return duration_; }

  double peak() const noexcept
  {
    double m = 0.0;
    for ( auto const& s : segments_ )
    {
      m = std::max( m, std::abs( s.end_voltage ) );
    }
    return m;
  }

  /*! \brief segment end times */
  std::vector<double> breakpoints() const
  {
    std::vector<double> bps;
    bps.reserve( segments_.size() );
    for ( std::size_t i = 0; i < segments_.size(); ++i )
    {
      bps.push_back( starts_[i] + segments_[i].duration );
    }
    return bps;
  }

  /*! \brief first time >= t at which the waveform has returned to 0 V */
  double next_zero( double t ) const noexcept
  {
    for ( std::size_t i = 0; i < segments_.size(); ++i )
    {
      double const end = starts_[i] + segments_[i].duration;
      if ( end >= t && segments_[i].end_voltage == 0.0 )
      {
        return end;
      }
    }
    return std::max( t, duration_ );
  }

  pulse_waveform scaled( double k ) const
  {
    auto segs = segments_;
    for ( auto& s : segs )
    {
      s.end_voltage *= k;
    }
    return pulse_waveform( std::move( segs ) );
  }

  std::span<segment const> segments() const noexcept { return segments_; }

  bool operator==( pulse_waveform const& other ) const { return segments_ == other.segments_; }

private:
  std::vector<segment> segments_;
  std::vector<double> starts_;
  double duration_{ 0.0 };
};

struct pulse_result
{
  cell_state state;
  std::vector<std::pair<double, switch_event_kind>> events;
  bool melted{ false };
};

/*! \brief Applies a waveform directly across a single cell (ideal source).
 *
 * Threshold switching and crystallization follow `step()`; in addition the
 * melt rule is evaluated: |v| >= v_reset for t_melt melts the cell, and the
 * time from leaving the melt level until the waveform is back at 0 V decides
 * between amorphization (<= t_quench_max) and recrystallization.
 */
inline pulse_result apply_pulse( cell_state state, pulse_waveform const& w, double dt = 1e-9 )
{
  pulse_result result{ std::move( state ), {}, false };
  auto& s = result.state;
  auto const& p = s.params;
  if ( w.duration() <= 0.0 )
  {
    return result;
  }

  auto const n = static_cast<std::size_t>( std::ceil( w.duration() / dt - 1e-9 ) );
  double const h = w.duration() / static_cast<double>( n );

  bool molten = false;
  cell_phase phase_before_melt = s.phase;
  double melt_dwell = 0.0;

  for ( std::size_t k = 1; k <= n; ++k )
  {
    double const t = static_cast<double>( k ) * h;
    double const v = w( t );
    if ( std::abs( v ) >= p.v_reset )
    {
      melt_dwell += h;
      if ( !molten && melt_dwell >= p.t_melt * ( 1.0 - detail::completion_slack ) )
      {
        molten = true;
        result.melted = true;
        phase_before_melt = s.phase;
        s.dynamic_on = false;
        s.cryst_progress = 0.0;
        s.threshold_dwell = 0.0;
      }
      if ( molten )
      {
        continue;
      }
    }
    else
    {
      melt_dwell = 0.0;
      if ( molten )
      {
        molten = false;
        double const quench = w.next_zero( t ) - ( t - h );
        if ( quench <= p.t_quench_max )
        {
          s.phase = cell_phase::amorphous;
        }
        else
        {
          s.phase = cell_phase::crystalline;
          if ( phase_before_melt == cell_phase::amorphous )
          {
            ++s.switch_count;
            result.events.emplace_back( t, switch_event_kind::set );
          }
        }
      }
    }

    auto r = step( s, v, h );
    s = r.state;
    if ( r.event )
    {
      result.events.emplace_back( t, *r.event );
    }
  }

  /* waveform is over: an unfinished ON state collapses */
  if ( s.dynamic_on || s.threshold_dwell > 0.0 )
  {
    s = step( s, 0.0, h ).state;
  }
  return result;
}

/*! \brief Reset entry point; identical physics to `apply_pulse`. */
inline cell_state apply_reset_pulse( cell_state state, pulse_waveform const& w, double dt = 1e-9 )
{
  return apply_pulse( std::move( state ), w, dt ).state;
}

/*! \brief Read resistance (0.2 V read); does not modify the cell. */
inline double read_resistance( cell_state const& s ) noexcept
{
  return s.is_crystalline() ? s.params.r_lrs : s.params.r_hrs;
}

enum class logic_level : std::uint8_t
{
  zero,
  one,
  indeterminate
};

inline char to_char( logic_level l )
{
  return l == logic_level::zero ? '0' : l == logic_level::one ? '1' : 'X';
}

/*! \brief Read bands: LRS (logic 1) at or below `lrs_max`, HRS (logic 0) at or above `hrs_min`. */
struct read_bands
{
  double lrs_max{ 10e3 };
  double hrs_min{ 100e3 };
};

inline logic_level logic_value( double resistance, read_bands const& bands = {} )
{
  if ( !( resistance > 0.0 ) )
  {
    throw error( error_code::invalid_argument, "resistance must be positive" );
  }
  if ( resistance >= bands.hrs_min )
  {
    return logic_level::zero;
  }
  if ( resistance <= bands.lrs_max )
  {
    return logic_level::one;
  }
  return logic_level::indeterminate;
}

inline logic_level read_logic( cell_state const& s )
{
  return logic_value( read_resistance( s ) );
}

/*! \brief Device-to-device variability.
 *
 * Resistances are lognormal around the nominal value (median = nominal), the
 * threshold voltage is normal. Relative sigmas must lie in [0, 0.5].
 */
struct variability_spec
{
  double sigma_r_lrs{ 0.0 };
  double sigma_r_hrs{ 0.0 };
  double sigma_vth{ 0.0 };
  /*! \brief resample until r_lrs <= bands.lrs_max and r_hrs >= bands.hrs_min */
  bool truncate_to_bands{ true };
  read_bands bands{};
  int max_retries{ 1000 };

  bool is_zero() const noexcept { return sigma_r_lrs == 0.0 && sigma_r_hrs == 0.0 && sigma_vth == 0.0; }

  static variability_spec none() { return {}; }

  /*! \brief sigma_vth = 5 %, sigma_r = 20 %, truncated to the read bands */
  static variability_spec standard() { return { 0.2, 0.2, 0.05, true, {}, 1000 }; }
};

inline device_params sample_device( device_params const& nominal, variability_spec const& var, std::uint64_t seed )
{
  for ( double sigma : { var.sigma_r_lrs, var.sigma_r_hrs, var.sigma_vth } )
  {
    if ( !( sigma >= 0.0 && sigma <= 0.5 ) )
    {
      throw error( error_code::invalid_argument, "relative sigmas must lie in [0, 0.5]" );
    }
  }
  if ( var.is_zero() )
  {
    return nominal;
  }

  std::mt19937_64 rng( seed );
  std::normal_distribution<double> z( 0.0, 1.0 );
  for ( int attempt = 0; attempt < std::max( 1, var.max_retries ); ++attempt )
  {
    device_params p = nominal;
    p.r_lrs = nominal.r_lrs * std::exp( var.sigma_r_lrs * z( rng ) );
    p.r_hrs = nominal.r_hrs * std::exp( var.sigma_r_hrs * z( rng ) );
    p.v_th = nominal.v_th * ( 1.0 + var.sigma_vth * z( rng ) );
    bool const in_bands = !var.truncate_to_bands || ( p.r_lrs <= var.bands.lrs_max && p.r_hrs >= var.bands.hrs_min );
    if ( p.valid() && in_bands )
    {
      return p;
    }
  }
  throw error( error_code::sampling_failed, "no valid device sample within the retry budget" );
}

} // namespace pcmlogic
