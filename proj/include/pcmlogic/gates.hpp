/*!
  \file gates.hpp
  \brief The four PCM stateful gates (NOR, IMPLY, OR, NIMP)

  Terminal configurations (TE_IN1, TE_IN2, TE_OUT, shared BE):

    NOR    V/2    V/2    V     10 kOhm to ground
    IMPLY  V/2    float  V     10 kOhm to ground   (OUT is also an operand)
    OR     0      0      V     floating
    NIMP   V      0.35   0     floating

  with V = 1.2 V. NOR and IMPLY use a two-part pulse (all terminals at V/2
  for a settling interval, then OUT raised to V); OR and NIMP use a single
  pulse with a long rise so the shared node can follow.

  Functionally every gate accumulates: out_new = out_old OR f(inputs), since
  a set pulse can only crystallize the output.
*/

#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "device.hpp"
#include "errors.hpp"
#include "solver.hpp"

namespace pcmlogic
{

enum class gate_kind : std::uint8_t
{
  NOR,
  IMPLY,
  OR,
  NIMP
};

inline constexpr std::array<gate_kind, 4> all_gate_kinds{ gate_kind::NOR, gate_kind::IMPLY, gate_kind::OR, gate_kind::NIMP };

inline std::string_view to_string( gate_kind k )
{
  switch ( k )
  {
  case gate_kind::NOR:   return "NOR";
  case gate_kind::IMPLY: return "IMPLY";
  case gate_kind::OR:    return "OR";
  case gate_kind::NIMP:  return "NIMP";
  }
  return "?";
}

inline std::optional<gate_kind> parse_gate_kind( std::string_view s )
{
  std::string up( s );
  for ( auto& c : up )
  {
    c = static_cast<char>( std::toupper( static_cast<unsigned char>( c ) ) );
  }
  for ( auto k : all_gate_kinds )
  {
    if ( up == to_string( k ) )
    {
      return k;
    }
  }
  return std::nullopt;
}

/*! \brief IMPLY uses OUT as its second operand and has no IN2. */
constexpr bool has_second_input( gate_kind k ) noexcept { return k != gate_kind::IMPLY; }

constexpr bool uses_fixed_resistor( gate_kind k ) noexcept { return k == gate_kind::NOR || k == gate_kind::IMPLY; }

enum class terminal : std::size_t
{
  in1 = 0,
  in2 = 1,
  out = 2
};

constexpr std::size_t index( terminal t ) noexcept { return static_cast<std::size_t>( t ); }

inline char const* to_string( terminal t )
{
  return t == terminal::in1 ? "IN1" : t == terminal::in2 ? "IN2" : "OUT";
}

/*! \brief Pulse timing of the gate drivers, seconds. */
struct pulse_timing
{
  /*! \brief edge time of the two-part NOR/IMPLY pulse */
  double edge{ 30e-9 };
  /*! \brief NOR/IMPLY settling interval with every terminal at V/2 */
  double settle{ 3e-6 };
  /*! \brief duration of the full-amplitude plateau */
  double plateau{ 1e-6 };
  /*! \brief OR/NIMP rise time */
  double ramp{ 70e-6 };
  /*! \brief OR/NIMP fall time */
  double ramp_fall{ 1e-6 };
  /*! \brief simulated time after the drivers return to 0 V */
  double tail{ 1e-6 };

  bool operator==( pulse_timing const& ) const = default;

  /*! \brief bench setup with large pad/probe parasitics */
  static pulse_timing experimental() { return {}; }

  /*! \brief integrated array: RC delays are small, pulses can be short */
  static pulse_timing integrated() { return { 10e-9, 200e-9, 1e-6, 50e-9, 50e-9, 200e-9 }; }
};

/*! \brief TE_IN2 bias of NIMP: the measured 0.35 V or V/3. */
enum class nimp_bias : std::uint8_t
{
  measured,
  third
};

struct gate_params
{
  /*! \brief applied set amplitude */
  double v_app{ 1.2 };
  /*! \brief grounded fixed resistor of NOR and IMPLY */
  double r_fix{ 10e3 };
  nimp_bias nimp{ nimp_bias::measured };
  pulse_timing timing{};

  bool operator==( gate_params const& ) const = default;

  double nimp_in2_voltage() const noexcept
  {
    return nimp == nimp_bias::measured ? 0.35 * ( v_app / 1.2 ) : v_app / 3.0;
  }
};

struct gate_config
{
  gate_kind kind;
  std::array<te_drive, 3> te;
  be_mode be;
  /*! \brief OUT must be initialized to HRS before the gate */
  bool requires_out_init;
  /*! \brief OUT is an operand and is overwritten */
  bool destructive;
  /*! \brief simulated duration including the tail */
  double duration;

  te_drive const& drive( terminal t ) const { return te[index( t )]; }

  /*! \brief terminal voltage on the final plateau; nullopt when floating */
  std::optional<double> plateau_voltage( terminal t ) const
  {
    auto const& d = drive( t );
    if ( is_floating( d ) )
    {
      return std::nullopt;
    }
    if ( auto const* w = std::get_if<pulse_waveform>( &d ) )
    {
      return w->peak();
    }
    return 0.0;
  }
};

inline gate_config make_gate_config( gate_kind kind, gate_params const& params = {} )
{
  auto const& tm = params.timing;
  double const v = params.v_app;
  double const half = 0.5 * v;

  gate_config cfg{ kind, { grounded_drive{}, grounded_drive{}, grounded_drive{} }, floating_be{}, true, false, 0.0 };

  if ( uses_fixed_resistor( kind ) )
  {
    pulse_waveform const in( { { tm.edge, half }, { tm.settle + tm.edge + tm.plateau, half }, { tm.edge, 0.0 } } );
    pulse_waveform const out(
        { { tm.edge, half }, { tm.settle, half }, { tm.edge, v }, { tm.plateau, v }, { tm.edge, 0.0 } } );
    cfg.te[index( terminal::in1 )] = in;
    cfg.te[index( terminal::in2 )] = kind == gate_kind::NOR ? te_drive{ in } : te_drive{ floating_drive{} };
    cfg.te[index( terminal::out )] = out;
    cfg.be = resistor_be{ params.r_fix };
    cfg.duration = out.duration() + tm.tail;
    if ( kind == gate_kind::IMPLY )
    {
      cfg.requires_out_init = false;
      cfg.destructive = true;
    }
    return cfg;
  }

  auto const shaped = [&]( double amplitude ) {
    return pulse_waveform( { { tm.ramp, amplitude }, { tm.plateau, amplitude }, { tm.ramp_fall, 0.0 } } );
  };
  if ( kind == gate_kind::OR )
  {
    cfg.te[index( terminal::out )] = shaped( v );
  }
  else
  {
    cfg.te[index( terminal::in1 )] = shaped( v );
    cfg.te[index( terminal::in2 )] = shaped( params.nimp_in2_voltage() );
  }
  cfg.duration = tm.ramp + tm.plateau + tm.ramp_fall + tm.tail;
  return cfg;
}

/*! \brief Boolean semantics of a gate with accumulation into OUT.
 *
 * For IMPLY, `in2` must be absent and `out_old` is the second operand.
 */
inline bool execute_gate_functional( gate_kind kind, bool in1, std::optional<bool> in2, bool out_old )
{
  if ( has_second_input( kind ) != in2.has_value() )
  {
    throw error( error_code::invalid_argument,
                 std::string( to_string( kind ) ) + ( in2 ? " takes no IN2 operand" : " requires an IN2 operand" ) );
  }
  bool f = false;
  switch ( kind )
  {
  case gate_kind::NOR:   f = !in1 && !*in2; break;
  case gate_kind::IMPLY: f = !in1; break;
  case gate_kind::OR:    f = in1 || *in2; break;
  case gate_kind::NIMP:  f = in1 && !*in2; break;
  }
  return out_old || f;
}

struct circuit_params
{
  gate_params gate{};
  /*! \brief shared-node parasitic capacitance */
  double c_p{ 10e-12 };
  step_policy policy{};
  /*! \brief run even though OUT is not in HRS (accumulating use) */
  bool allow_initialized_output{ false };
};

struct gate_result
{
  gate_kind kind;
  logic_level output;
  std::array<double, 3> r_pre;
  std::array<double, 3> r_post;
  /*! \brief max |r_post - r_pre| / r_pre over the input cells */
  double max_input_drift;
  std::array<cell_state, 3> cells;
  sim_trace trace;
};

/*! \brief Input cells whose state must be preserved by the gate. */
inline std::vector<terminal> input_terminals( gate_kind kind )
{
  if ( has_second_input( kind ) )
  {
    return { terminal::in1, terminal::in2 };
  }
  return { terminal::in1 };
}

/*! \brief Runs one gate on three cells (IN1, IN2, OUT) with the shared-node solver.
 *
 * For IMPLY the IN2 cell is present but its TE floats, so it does not take part.
 */
inline gate_result execute_gate_circuit( gate_kind kind, std::array<cell_state, 3> const& cells,
                                         circuit_params const& params = {} )
{
  auto const cfg = make_gate_config( kind, params.gate );

  for ( std::size_t i = 0; i < 3; ++i )
  {
    if ( is_floating( cfg.te[i] ) )
    {
      continue;
    }
    if ( read_logic( cells[i] ) == logic_level::indeterminate )
    {
      throw error( error_code::indeterminate_state,
                   std::string( to_string( static_cast<terminal>( i ) ) ) + " is between the read bands" );
    }
  }
  if ( cfg.requires_out_init && !params.allow_initialized_output &&
       read_logic( cells[index( terminal::out )] ) != logic_level::zero )
  {
    throw error( error_code::output_not_initialized, "OUT must be in HRS before a " + std::string( to_string( kind ) ) );
  }

  circuit_config circuit;
  circuit.cells.assign( cells.begin(), cells.end() );
  circuit.te_drives.assign( cfg.te.begin(), cfg.te.end() );
  circuit.be = cfg.be;
  circuit.c_p = params.c_p;

  gate_result result{ kind, logic_level::indeterminate, {}, {}, 0.0, cells, solve_transient( circuit, cfg.duration, params.policy ) };
  for ( std::size_t i = 0; i < 3; ++i )
  {
    result.cells[i] = result.trace.final_cells[i];
    result.r_pre[i] = read_resistance( cells[i] );
    result.r_post[i] = read_resistance( result.cells[i] );
  }
  for ( auto t : input_terminals( kind ) )
  {
    auto const i = index( t );
    result.max_input_drift = std::max( result.max_input_drift, std::abs( result.r_post[i] - result.r_pre[i] ) / result.r_pre[i] );
  }
  result.output = read_logic( result.cells[index( terminal::out )] );
  return result;
}

/*! \brief PASS iff input drift <= tolerance (inclusive) and no input changed logic value. */
inline bool input_stability( gate_result const& result, double tolerance = 0.05 )
{
  if ( result.max_input_drift > tolerance )
  {
    return false;
  }
  for ( auto t : input_terminals( result.kind ) )
  {
    auto const i = index( t );
    if ( logic_value( result.r_pre[i] ) != logic_value( result.r_post[i] ) )
    {
      return false;
    }
  }
  return true;
}

/*! \brief One operand combination of a gate. For IMPLY `in2` is absent and `out_old` is the operand. */
struct operand_combination
{
  bool in1;
  std::optional<bool> in2;
  bool out_old;

  std::string label() const
  {
    std::string s;
    s += in1 ? '1' : '0';
    s += in2 ? ( *in2 ? '1' : '0' ) : ( out_old ? '1' : '0' );
    return s;
  }
};

/*! \brief Operand combinations examined per gate, OUT preset to 0 except IMPLY's operand. */
inline std::vector<operand_combination> operand_combinations( gate_kind kind )
{
  std::vector<operand_combination> combos;
  for ( int a = 0; a < 2; ++a )
  {
    for ( int b = 0; b < 2; ++b )
    {
      if ( has_second_input( kind ) )
      {
        combos.push_back( { a == 1, b == 1, false } );
      }
      else
      {
        combos.push_back( { a == 1, std::nullopt, b == 1 } );
      }
    }
  }
  return combos;
}

inline std::array<cell_state, 3> cells_for( operand_combination const& c, device_params const& params = {} )
{
  return { make_cell( c.in1, params ), make_cell( c.in2.value_or( false ), params ), make_cell( c.out_old, params ) };
}

enum class exec_mode : std::uint8_t
{
  functional,
  circuit
};

struct truth_row
{
  operand_combination operands;
  logic_level out_new;
  /*! \brief inputs preserved (always true in functional mode) */
  bool inputs_stable;
};

inline std::vector<truth_row> truth_table( gate_kind kind, exec_mode mode, circuit_params const& params = {},
                                           device_params const& device = {} )
{
  std::vector<truth_row> rows;
  for ( auto const& c : operand_combinations( kind ) )
  {
    if ( mode == exec_mode::functional )
    {
      bool const out = execute_gate_functional( kind, c.in1, c.in2, c.out_old );
      rows.push_back( { c, out ? logic_level::one : logic_level::zero, true } );
      continue;
    }
    auto p = params;
    p.policy.record_samples = false;
    auto const r = execute_gate_circuit( kind, cells_for( c, device ), p );
    rows.push_back( { c, r.output, input_stability( r ) } );
  }
  return rows;
}

/*! \brief Programming pulses of the write-verify loop. */
struct write_params
{
  /*! \brief 1.2 V, 30/500/500 ns */
  pulse_waveform set_pulse{ pulse_waveform::trapezoid( 30e-9, 500e-9, 500e-9, 1.2 ) };
  /*! \brief 3.0 V, 30/50/30 ns */
  pulse_waveform reset_pulse{ pulse_waveform::trapezoid( 30e-9, 50e-9, 30e-9, 3.0 ) };
  double dt{ 1e-9 };
};

struct write_result
{
  cell_state cell;
  /*! \brief programming pulses applied */
  int pulses;
  int reads;
};

/*! \brief Program-and-verify: read, pulse if needed, repeat until the target band is reached. */
inline write_result write_verify( cell_state cell, bool target, int max_attempts = 10, write_params const& params = {} )
{
  if ( max_attempts < 1 )
  {
    throw error( error_code::invalid_argument, "max_attempts must be at least 1" );
  }
  auto const want = target ? logic_level::one : logic_level::zero;
  write_result r{ std::move( cell ), 0, 0 };
  while ( true )
  {
    ++r.reads;
    if ( read_logic( r.cell ) == want )
    {
      return r;
    }
    if ( r.pulses == max_attempts )
    {
      throw error( error_code::verify_failed,
                   "cell did not reach logic " + std::string( target ? "1" : "0" ) + " after " +
                       std::to_string( max_attempts ) + " pulses" );
    }
    r.cell = apply_pulse( std::move( r.cell ), target ? params.set_pulse : params.reset_pulse, params.dt ).state;
    ++r.pulses;
  }
}

} // namespace pcmlogic
