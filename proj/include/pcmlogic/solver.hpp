/*!
  \file solver.hpp
  \brief Steady-state and transient solver for N cells sharing one bottom electrode

  Topology: every cell connects its top electrode (TE) to a driver and its
  bottom electrode to the shared node B. Node B has a parasitic capacitance
  `c_p` to ground and optionally a grounded fixed resistor. The node equation

      c_p dV_B/dt = sum_i g_i (V_i - offset_i - V_B) - g_fix V_B

  is integrated with backward Euler, using each cell's branch (conductance and
  ON-state holding offset) frozen at the start of the step. Changes of a cell's
  switching regime inside a step are located by bisection on the step size.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "device.hpp"
#include "errors.hpp"

namespace pcmlogic
{

struct grounded_drive
{
  bool operator==( grounded_drive const& ) const = default;
};

struct floating_drive
{
  bool operator==( floating_drive const& ) const = default;
};

using te_drive = std::variant<pulse_waveform, grounded_drive, floating_drive>;

inline bool is_floating( te_drive const& d ) noexcept { return std::holds_alternative<floating_drive>( d ); }

inline double drive_voltage( te_drive const& d, double t ) noexcept
{
  if ( auto const* w = std::get_if<pulse_waveform>( &d ) )
  {
    return ( *w )( t );
  }
  return 0.0;
}

struct floating_be
{
  bool operator==( floating_be const& ) const = default;
};

struct resistor_be
{
  double r_fix{ 10e3 };

  bool operator==( resistor_be const& ) const = default;
};

using be_mode = std::variant<floating_be, resistor_be>;

inline double fixed_conductance( be_mode const& be ) noexcept
{
  if ( auto const* r = std::get_if<resistor_be>( &be ) )
  {
    return 1.0 / r->r_fix;
  }
  return 0.0;
}

struct circuit_config
{
  std::vector<cell_state> cells;
  std::vector<te_drive> te_drives;
  be_mode be{ floating_be{} };
  /*! \brief parasitic capacitance of the shared node, farads */
  double c_p{ 0.0 };

  void validate() const
  {
    if ( cells.size() < 2u )
    {
      throw error( error_code::invalid_argument, "a shared-node circuit needs at least two cells" );
    }
    if ( te_drives.size() != cells.size() )
    {
      throw error( error_code::invalid_argument, "one TE drive per cell is required" );
    }
    if ( auto const* r = std::get_if<resistor_be>( &be ); r && !( r->r_fix > 0.0 ) )
    {
      throw error( error_code::invalid_argument, "r_fix must be positive" );
    }
    if ( !( c_p >= 0.0 ) )
    {
      throw error( error_code::invalid_argument, "c_p must be non-negative" );
    }
    bool const any_path = std::holds_alternative<resistor_be>( be ) ||
                          std::any_of( te_drives.begin(), te_drives.end(), []( auto const& d ) { return !is_floating( d ); } );
    if ( !any_path )
    {
      throw error( error_code::isolated_node, "every terminal is floating and the bottom electrode is floating" );
    }
    for ( auto const& c : cells )
    {
      c.params.validate();
    }
  }
};

struct step_policy
{
  /*! \brief base time step */
  double dt{ 1e-9 };
  /*! \brief width to which regime crossings are bisected */
  double event_tolerance{ 0.1e-9 };
  /*! \brief keep every cell in its initial state (linear analysis) */
  bool freeze_states{ false };
  /*! \brief store per-step samples; events and final states are always kept */
  bool record_samples{ true };
};

struct trace_event
{
  double time;
  std::size_t cell;
  switch_event_kind kind;
};

/*! \brief Time series of a transient run. Per-cell vectors are indexed [cell][sample]. */
struct sim_trace
{
  std::vector<double> time;
  std::vector<double> v_be;
  std::vector<std::vector<double>> v_across;
  std::vector<std::vector<double>> resistance;
  std::vector<trace_event> events;
  std::vector<cell_state> final_cells;
  /*! \brief largest KCL defect of any accepted step, amperes */
  double max_kcl_residual{ 0.0 };
  std::size_t steps{ 0 };
};

/*! \brief Node voltage of the resistive divider.
 *
 * `te_volts[i]` is the TE voltage of cell i, or nullopt for a floating TE.
 * Returns (sum_i g_i V_i) / (sum_i g_i + g_fix) over non-floating cells.
 */
inline double steady_state_node_voltage( std::span<std::optional<double> const> te_volts,
                                         std::span<double const> conductances, be_mode const& be )
{
  if ( te_volts.size() != conductances.size() )
  {
    throw error( error_code::invalid_argument, "one conductance per terminal is required" );
  }
  double num = 0.0;
  double den = fixed_conductance( be );
  bool any = std::holds_alternative<resistor_be>( be );
  for ( std::size_t i = 0; i < te_volts.size(); ++i )
  {
    if ( !te_volts[i] )
    {
      continue;
    }
    any = true;
    num += conductances[i] * *te_volts[i];
    den += conductances[i];
  }
  if ( !any || !( den > 0.0 ) )
  {
    throw error( error_code::isolated_node, "the shared node has no conduction path" );
  }
  return num / den;
}

namespace detail
{

class transient_solver
{
public:
  transient_solver( circuit_config const& config, step_policy const& policy )
      : cfg_( config ), policy_( policy ), cells_( config.cells ), g_fix_( fixed_conductance( config.be ) )
  {
    cfg_.validate();
    if ( !( policy_.dt > 0.0 ) || !( policy_.event_tolerance > 0.0 ) )
    {
      throw error( error_code::invalid_argument, "step policy needs positive dt and event tolerance" );
    }
    n_ = cells_.size();
    v_cell_.assign( n_, 0.0 );
  }

  sim_trace run( double duration )
  {
    if ( !( duration > 0.0 ) )
    {
      throw error( error_code::invalid_argument, "duration must be positive" );
    }
    collect_breakpoints( duration );

    trace_.v_across.assign( n_, {} );
    trace_.resistance.assign( n_, {} );

    /* the capacitor starts discharged; without it the node is quasi-static from t = 0 */
    auto const initial = trial( 0.0 );
    v_ = cfg_.c_p > 0.0 ? 0.0 : initial.v_be;
    for ( std::size_t i = 0; i < n_; ++i )
    {
      v_cell_[i] = is_floating( cfg_.te_drives[i] ) ? 0.0 : drive_voltage( cfg_.te_drives[i], 0.0 ) - v_;
    }
    record();

    double const t_eps = duration * 1e-12;
    while ( t_ < duration - t_eps )
    {
      double const h = max_step( duration );
      auto const full = trial( h );
      if ( !regime_changes( full ) )
      {
        commit( h, full );
        continue;
      }
      if ( h <= policy_.event_tolerance )
      {
        commit( h, full );
        continue;
      }

      double lo = 0.0;
      double hi = h;
      int guard = 0;
      while ( hi - lo > policy_.event_tolerance && guard++ < 200 )
      {
        double const mid = 0.5 * ( lo + hi );
        if ( regime_changes( trial( mid ) ) )
        {
          hi = mid;
        }
        else
        {
          lo = mid;
        }
      }
      if ( lo > 0.0 )
      {
        commit( lo, trial( lo ) );
      }
      double const rest = hi - lo;
      commit( rest, trial( rest ) );
    }

    trace_.final_cells = cells_;
    return std::move( trace_ );
  }

private:
  struct trial_result
  {
    double v_be;
    double residual;
    std::vector<double> v_across;
  };

  void collect_breakpoints( double duration )
  {
    for ( auto const& d : cfg_.te_drives )
    {
      if ( auto const* w = std::get_if<pulse_waveform>( &d ) )
      {
        for ( double bp : w->breakpoints() )
        {
          if ( bp > 0.0 && bp < duration )
          {
            breakpoints_.push_back( bp );
          }
        }
      }
    }
    std::sort( breakpoints_.begin(), breakpoints_.end() );
    breakpoints_.erase( std::unique( breakpoints_.begin(), breakpoints_.end() ), breakpoints_.end() );
  }

  double max_step( double duration )
  {
    double h = std::min( policy_.dt, duration - t_ );
    while ( next_bp_ < breakpoints_.size() && breakpoints_[next_bp_] <= t_ * ( 1.0 + 1e-12 ) )
    {
      ++next_bp_;
    }
    if ( next_bp_ < breakpoints_.size() )
    {
      h = std::min( h, breakpoints_[next_bp_] - t_ );
    }
    if ( !policy_.freeze_states )
    {
      for ( std::size_t i = 0; i < n_; ++i )
      {
        auto const& c = cells_[i];
        if ( is_floating( cfg_.te_drives[i] ) || c.is_crystalline() )
        {
          continue;
        }
        /* land exactly on ON-state entry and on crystallization completion */
        if ( !c.dynamic_on && c.threshold_dwell > 0.0 )
        {
          h = std::min( h, c.params.t_delay - c.threshold_dwell );
        }
        else if ( c.dynamic_on )
        {
          h = std::min( h, c.params.t_cryst - c.cryst_progress );
        }
      }
    }
    return std::max( h, policy_.event_tolerance * 1e-6 );
  }

  trial_result trial( double h ) const
  {
    double const t = t_ + h;
    double const cap = ( cfg_.c_p > 0.0 && h > 0.0 ) ? cfg_.c_p / h : 0.0;
    double num = cap * v_;
    double den = cap + g_fix_;
    for ( std::size_t i = 0; i < n_; ++i )
    {
      if ( is_floating( cfg_.te_drives[i] ) )
      {
        continue;
      }
      auto const b = branch_of( cells_[i] );
      num += b.g * ( drive_voltage( cfg_.te_drives[i], t ) - b.offset );
      den += b.g;
    }
    if ( !( den > 0.0 ) || !std::isfinite( num ) )
    {
      throw error( error_code::non_convergence, "singular node equation at t = " + std::to_string( t ) );
    }
    trial_result r{ num / den, 0.0, std::vector<double>( n_, 0.0 ) };
    if ( !std::isfinite( r.v_be ) )
    {
      throw error( error_code::non_convergence, "non-finite node voltage at t = " + std::to_string( t ) );
    }

    /* KCL defect of the accepted implicit step */
    double res = cap * ( r.v_be - v_ ) + g_fix_ * r.v_be;
    for ( std::size_t i = 0; i < n_; ++i )
    {
      if ( is_floating( cfg_.te_drives[i] ) )
      {
        continue;
      }
      auto const b = branch_of( cells_[i] );
      double const vte = drive_voltage( cfg_.te_drives[i], t );
      r.v_across[i] = vte - r.v_be;
      res -= b.g * ( vte - b.offset - r.v_be );
    }
    r.residual = std::abs( res );
    return r;
  }

  /* 0: inert, 1: below v_th, 2: at/above v_th, 3: ON below hold, 4: ON holding */
  int regime( std::size_t i, double v ) const noexcept
  {
    auto const& c = cells_[i];
    if ( policy_.freeze_states || is_floating( cfg_.te_drives[i] ) || c.is_crystalline() )
    {
      return 0;
    }
    if ( !c.dynamic_on )
    {
      return std::abs( v ) >= c.params.v_th ? 2 : 1;
    }
    return c.on_polarity * v >= c.params.v_hold ? 4 : 3;
  }

  bool regime_changes( trial_result const& r ) const noexcept
  {
    for ( std::size_t i = 0; i < n_; ++i )
    {
      if ( regime( i, v_cell_[i] ) != regime( i, r.v_across[i] ) )
      {
        return true;
      }
    }
    return false;
  }

  void commit( double h, trial_result const& r )
  {
    t_ += h;
    v_ = r.v_be;
    trace_.max_kcl_residual = std::max( trace_.max_kcl_residual, r.residual );
    ++trace_.steps;
    for ( std::size_t i = 0; i < n_; ++i )
    {
      v_cell_[i] = r.v_across[i];
      if ( policy_.freeze_states || is_floating( cfg_.te_drives[i] ) )
      {
        continue;
      }
      auto s = step( cells_[i], r.v_across[i], h );
      cells_[i] = s.state;
      if ( s.event )
      {
        trace_.events.push_back( { t_, i, *s.event } );
      }
    }
    record();
  }

  void record()
  {
    if ( !policy_.record_samples )
    {
      return;
    }
    trace_.time.push_back( t_ );
    trace_.v_be.push_back( v_ );
    for ( std::size_t i = 0; i < n_; ++i )
    {
      trace_.v_across[i].push_back( v_cell_[i] );
      trace_.resistance[i].push_back( 1.0 / conductance( cells_[i] ) );
    }
  }

  circuit_config cfg_;
  step_policy policy_;
  std::vector<cell_state> cells_;
  double g_fix_;
  std::size_t n_{ 0 };
  std::vector<double> breakpoints_;
  std::size_t next_bp_{ 0 };
  double t_{ 0.0 };
  double v_{ 0.0 };
  std::vector<double> v_cell_;
  sim_trace trace_;
};

} // namespace detail

/*! \brief Integrates the shared-node circuit for `duration` seconds.
 *
 * Cell states are advanced with `step()`; every threshold and set event is
 * time-stamped. With `c_p == 0` the node is solved quasi-statically.
 */
inline sim_trace solve_transient( circuit_config const& config, double duration, step_policy const& policy = {} )
{
  return detail::transient_solver( config, policy ).run( duration );
}

} // namespace pcmlogic
