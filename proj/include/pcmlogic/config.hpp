/*!
  \file config.hpp
  \brief Named parameter presets and their JSON representation
*/

#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "device.hpp"
#include "errors.hpp"
#include "gates.hpp"

namespace pcmlogic
{

struct workbench_config
{
  std::string preset;
  device_params device{};
  variability_spec variability{ variability_spec::standard() };
  circuit_params circuit{};
  int write_attempts{ 10 };

  void validate() const
  {
    auto const bad = []( std::string const& m ) { throw error( error_code::config_error, m ); };
    if ( !device.valid() )
    {
      bad( "device parameters violate their invariants" );
    }
    for ( double s : { variability.sigma_r_lrs, variability.sigma_r_hrs, variability.sigma_vth } )
    {
      if ( !( s >= 0.0 && s <= 0.5 ) )
      {
        bad( "relative sigmas must lie in [0, 0.5]" );
      }
    }
    if ( !( circuit.c_p >= 0.0 ) || !( circuit.gate.r_fix > 0.0 ) || !( circuit.gate.v_app > 0.0 ) )
    {
      bad( "c_p must be >= 0, r_fix and v_app > 0" );
    }
    auto const& t = circuit.gate.timing;
    for ( double d : { t.edge, t.settle, t.plateau, t.ramp, t.ramp_fall, t.tail } )
    {
      if ( !( d > 0.0 ) )
      {
        bad( "pulse timings must be positive" );
      }
    }
    if ( !( circuit.policy.dt > 0.0 && circuit.policy.dt <= device.t_delay / 4.0 ) )
    {
      bad( "solver dt must be positive and at most t_delay / 4" );
    }
    if ( !( circuit.policy.event_tolerance > 0.0 && circuit.policy.event_tolerance <= circuit.policy.dt ) )
    {
      bad( "event tolerance must lie in (0, dt]" );
    }
    if ( write_attempts < 1 )
    {
      bad( "write attempts must be at least 1" );
    }
  }
};

inline std::vector<std::string> preset_names() { return { "experimental-setup", "integrated" }; }

/*! \brief "experimental-setup": 10 pF node, microsecond pulses with a 70 us ramp.
 *  "integrated": 10 fF node, nanosecond pulses.
 */
inline workbench_config make_preset( std::string_view name )
{
  workbench_config c;
  c.preset = std::string( name );
  if ( name == "experimental-setup" )
  {
    c.circuit.c_p = 10e-12;
    c.circuit.gate.timing = pulse_timing::experimental();
  }
  else if ( name == "integrated" )
  {
    c.circuit.c_p = 10e-15;
    c.circuit.gate.timing = pulse_timing::integrated();
  }
  else
  {
    throw error( error_code::config_error, "unknown preset '" + std::string( name ) + "'" );
  }
  return c;
}

inline nlohmann::ordered_json to_json( workbench_config const& c )
{
  auto const& d = c.device;
  auto const& v = c.variability;
  auto const& g = c.circuit.gate;
  auto const& t = g.timing;
  nlohmann::ordered_json j;
  j["preset"] = c.preset;
  j["device"] = { { "v_th", d.v_th },       { "r_lrs", d.r_lrs },         { "r_hrs", d.r_hrs },
                  { "r_on", d.r_on },       { "v_hold", d.v_hold },       { "t_delay", d.t_delay },
                  { "t_cryst", d.t_cryst }, { "v_reset", d.v_reset },     { "t_melt", d.t_melt },
                  { "t_quench_max", d.t_quench_max }, { "v_read_max", d.v_read_max } };
  j["variability"] = { { "sigma_r_lrs", v.sigma_r_lrs },
                       { "sigma_r_hrs", v.sigma_r_hrs },
                       { "sigma_vth", v.sigma_vth },
                       { "truncate_to_bands", v.truncate_to_bands },
                       { "lrs_max", v.bands.lrs_max },
                       { "hrs_min", v.bands.hrs_min },
                       { "max_retries", v.max_retries } };
  j["circuit"] = { { "c_p", c.circuit.c_p },
                   { "v_app", g.v_app },
                   { "r_fix", g.r_fix },
                   { "nimp_bias", g.nimp == nimp_bias::measured ? "measured" : "third" },
                   { "dt", c.circuit.policy.dt },
                   { "event_tolerance", c.circuit.policy.event_tolerance } };
  j["timing"] = { { "edge", t.edge },   { "settle", t.settle },       { "plateau", t.plateau },
                  { "ramp", t.ramp },   { "ramp_fall", t.ramp_fall }, { "tail", t.tail } };
  j["write_attempts"] = c.write_attempts;
  return j;
}

namespace detail
{

template<typename T>
void overlay( nlohmann::json const& obj, std::string const& section, std::string const& key, T& field )
{
  if ( !obj.contains( key ) )
  {
    return;
  }
  try
  {
    field = obj.at( key ).get<T>();
  }
  catch ( nlohmann::json::exception const& )
  {
    throw error( error_code::config_error, "bad value for " + section + "." + key );
  }
}

inline void reject_unknown( nlohmann::json const& obj, std::string const& section, std::vector<std::string> const& known )
{
  if ( !obj.is_object() )
  {
    throw error( error_code::config_error, section + " must be an object" );
  }
  for ( auto it = obj.begin(); it != obj.end(); ++it )
  {
    if ( std::find( known.begin(), known.end(), it.key() ) == known.end() )
    {
      throw error( error_code::config_error, "unknown key " + ( section.empty() ? "" : section + "." ) + it.key() );
    }
  }
}

} // namespace detail

/*! \brief Starts from `j["preset"]` (or `fallback_preset`) and overrides every key present. */
inline workbench_config config_from_json( nlohmann::json const& j, std::string_view fallback_preset = "experimental-setup" )
{
  using detail::overlay;
  using detail::reject_unknown;
  reject_unknown( j, "", { "preset", "device", "variability", "circuit", "timing", "write_attempts" } );
  std::string preset( fallback_preset );
  overlay( j, "", "preset", preset );
  auto c = make_preset( preset );

  if ( j.contains( "device" ) )
  {
    auto const& d = j["device"];
    reject_unknown( d, "device", { "v_th", "r_lrs", "r_hrs", "r_on", "v_hold", "t_delay", "t_cryst", "v_reset", "t_melt",
                                   "t_quench_max", "v_read_max" } );
    auto& p = c.device;
    overlay( d, "device", "v_th", p.v_th );
    overlay( d, "device", "r_lrs", p.r_lrs );
    overlay( d, "device", "r_hrs", p.r_hrs );
    overlay( d, "device", "r_on", p.r_on );
    overlay( d, "device", "v_hold", p.v_hold );
    overlay( d, "device", "t_delay", p.t_delay );
    overlay( d, "device", "t_cryst", p.t_cryst );
    overlay( d, "device", "v_reset", p.v_reset );
    overlay( d, "device", "t_melt", p.t_melt );
    overlay( d, "device", "t_quench_max", p.t_quench_max );
    overlay( d, "device", "v_read_max", p.v_read_max );
  }
  if ( j.contains( "variability" ) )
  {
    auto const& v = j["variability"];
    reject_unknown( v, "variability", { "sigma_r_lrs", "sigma_r_hrs", "sigma_vth", "truncate_to_bands", "lrs_max", "hrs_min",
                                        "max_retries" } );
    auto& p = c.variability;
    overlay( v, "variability", "sigma_r_lrs", p.sigma_r_lrs );
    overlay( v, "variability", "sigma_r_hrs", p.sigma_r_hrs );
    overlay( v, "variability", "sigma_vth", p.sigma_vth );
    overlay( v, "variability", "truncate_to_bands", p.truncate_to_bands );
    overlay( v, "variability", "lrs_max", p.bands.lrs_max );
    overlay( v, "variability", "hrs_min", p.bands.hrs_min );
    overlay( v, "variability", "max_retries", p.max_retries );
  }
  if ( j.contains( "circuit" ) )
  {
    auto const& k = j["circuit"];
    reject_unknown( k, "circuit", { "c_p", "v_app", "r_fix", "nimp_bias", "dt", "event_tolerance" } );
    overlay( k, "circuit", "c_p", c.circuit.c_p );
    overlay( k, "circuit", "v_app", c.circuit.gate.v_app );
    overlay( k, "circuit", "r_fix", c.circuit.gate.r_fix );
    overlay( k, "circuit", "dt", c.circuit.policy.dt );
    overlay( k, "circuit", "event_tolerance", c.circuit.policy.event_tolerance );
    std::string bias = c.circuit.gate.nimp == nimp_bias::measured ? "measured" : "third";
    overlay( k, "circuit", "nimp_bias", bias );
    if ( bias != "measured" && bias != "third" )
    {
      throw error( error_code::config_error, "circuit.nimp_bias must be \"measured\" or \"third\"" );
    }
    c.circuit.gate.nimp = bias == "measured" ? nimp_bias::measured : nimp_bias::third;
  }
  if ( j.contains( "timing" ) )
  {
    auto const& t = j["timing"];
    reject_unknown( t, "timing", { "edge", "settle", "plateau", "ramp", "ramp_fall", "tail" } );
    auto& p = c.circuit.gate.timing;
    overlay( t, "timing", "edge", p.edge );
    overlay( t, "timing", "settle", p.settle );
    overlay( t, "timing", "plateau", p.plateau );
    overlay( t, "timing", "ramp", p.ramp );
    overlay( t, "timing", "ramp_fall", p.ramp_fall );
    overlay( t, "timing", "tail", p.tail );
  }
  overlay( j, "", "write_attempts", c.write_attempts );
  c.validate();
  return c;
}

} // namespace pcmlogic
