/*!
  \file margins.hpp
  \brief Worst-case voltage margins of a gate over resistance-band corners
*/

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "device.hpp"
#include "gates.hpp"
#include "solver.hpp"

namespace pcmlogic
{

/*! \brief Resistance intervals a stored bit may occupy.
 *
 * Corner sweeps use both ends of each interval. The defaults collapse each
 * interval to the read-band edge closest to the other state.
 */
struct resistance_bands
{
  double lrs_lo{ 10e3 };
  double lrs_hi{ 10e3 };
  double hrs_lo{ 100e3 };
  double hrs_hi{ 100e3 };

  static resistance_bands points( double lrs, double hrs ) { return { lrs, lrs, hrs, hrs }; }

  void validate() const
  {
    if ( !( lrs_lo > 0.0 && lrs_lo <= lrs_hi && hrs_lo > 0.0 && hrs_lo <= hrs_hi ) )
    {
      throw error( error_code::invalid_argument, "resistance bands must be positive, ordered intervals" );
    }
  }
};

/*! \brief Steady-state plateau voltages for one corner */
struct margin_corner
{
  operand_combination operands;
  /*! \brief resistance of IN1, IN2, OUT (IN2 is 0 when unused) */
  std::array<double, 3> resistance;
  double v_be;
  /*! \brief magnitude of the voltage across OUT */
  double v_out;
  /*! \brief largest |voltage| across an input cell */
  double v_input_max;
  bool switching;
};

struct margin_report
{
  gate_kind kind;
  double v_th;
  /*! \brief min over switching corners of V_OUT - v_th */
  double switching_margin;
  /*! \brief v_th - max over non-switching corners of V_OUT */
  double non_switching_margin;
  /*! \brief v_th - largest |voltage| across any input cell */
  double input_margin;
  std::vector<margin_corner> corners;

  bool pass() const { return switching_margin > 0.0 && non_switching_margin > 0.0; }
};

/*! \brief Sweeps every band-edge assignment of the operand resistances for each truth-table combination.
 *
 * OUT starts in HRS. A combination is a switching case when the gate's
 * Boolean function yields 1 from an HRS output.
 */
inline margin_report worst_case_margins( gate_config const& gate, resistance_bands const& bands = {},
                                         device_params const& device = {} )
{
  bands.validate();
  margin_report report{ gate.kind, device.v_th, std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), {} };

  std::array<std::optional<double>, 3> te_volts;
  for ( auto t : { terminal::in1, terminal::in2, terminal::out } )
  {
    te_volts[index( t )] = gate.plateau_voltage( t );
  }
  bool const uses_in2 = has_second_input( gate.kind );

  for ( auto const& combo : operand_combinations( gate.kind ) )
  {
    if ( combo.out_old )
    {
      continue;
    }
    bool const switching = execute_gate_functional( gate.kind, combo.in1, combo.in2, false );
    std::array<bool, 3> const bits{ combo.in1, combo.in2.value_or( false ), false };

    for ( unsigned mask = 0; mask < 8u; ++mask )
    {
      if ( !uses_in2 && ( mask & 2u ) )
      {
        continue;
      }
      std::array<double, 3> r{};
      std::array<double, 3> g{};
      for ( std::size_t i = 0; i < 3; ++i )
      {
        bool const hi = ( mask >> i ) & 1u;
        r[i] = bits[i] ? ( hi ? bands.lrs_hi : bands.lrs_lo ) : ( hi ? bands.hrs_hi : bands.hrs_lo );
        g[i] = 1.0 / r[i];
      }
      auto volts = te_volts;
      if ( !uses_in2 )
      {
        volts[index( terminal::in2 )] = std::nullopt;
        r[index( terminal::in2 )] = 0.0;
      }
      double const vb = steady_state_node_voltage( volts, g, gate.be );
      double const vout = std::abs( volts[index( terminal::out )].value_or( vb ) - vb );
      double vin = 0.0;
      for ( auto t : input_terminals( gate.kind ) )
      {
        if ( auto v = volts[index( t )] )
        {
          vin = std::max( vin, std::abs( *v - vb ) );
        }
      }
      report.corners.push_back( { combo, r, vb, vout, vin, switching } );
      if ( switching )
      {
        report.switching_margin = std::min( report.switching_margin, vout - device.v_th );
      }
      else
      {
        report.non_switching_margin = std::min( report.non_switching_margin, device.v_th - vout );
      }
      report.input_margin = std::min( report.input_margin, device.v_th - vin );
    }
  }
  return report;
}

inline nlohmann::ordered_json to_json( margin_report const& m )
{
  nlohmann::ordered_json j;
  j["gate"] = to_string( m.kind );
  j["v_th"] = m.v_th;
  j["switching_margin"] = m.switching_margin;
  j["non_switching_margin"] = m.non_switching_margin;
  j["input_margin"] = m.input_margin;
  j["pass"] = m.pass();
  auto& cs = j["corners"] = nlohmann::ordered_json::array();
  for ( auto const& c : m.corners )
  {
    cs.push_back( { { "operands", c.operands.label() },
                    { "r_in1", c.resistance[0] },
                    { "r_in2", c.resistance[1] },
                    { "r_out", c.resistance[2] },
                    { "v_be", c.v_be },
                    { "v_out", c.v_out },
                    { "v_input_max", c.v_input_max },
                    { "switching", c.switching } } );
  }
  return j;
}

} // namespace pcmlogic
