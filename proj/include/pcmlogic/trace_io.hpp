/*!
  \file trace_io.hpp
  \brief CSV and JSON export of transient traces
*/

#pragma once

#include <cstddef>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "solver.hpp"

namespace pcmlogic
{

/*! \brief Columns: time_s, v_be_V, then cell<i>_v_V and cell<i>_r_ohm for each cell in order */
inline void write_trace_csv( std::ostream& os, sim_trace const& trace )
{
  std::size_t const cells = trace.v_across.size();
  os << "time_s,v_be_V";
  for ( std::size_t i = 0; i < cells; ++i )
  {
    os << ",cell" << i << "_v_V,cell" << i << "_r_ohm";
  }
  os << '\n';
  char buf[64];
  for ( std::size_t k = 0; k < trace.time.size(); ++k )
  {
    std::snprintf( buf, sizeof( buf ), "%.9g,%.9g", trace.time[k], trace.v_be[k] );
    os << buf;
    for ( std::size_t i = 0; i < cells; ++i )
    {
      std::snprintf( buf, sizeof( buf ), ",%.9g,%.9g", trace.v_across[i][k], trace.resistance[i][k] );
      os << buf;
    }
    os << '\n';
  }
}

/*! \brief List of {t, cell, kind} */
inline nlohmann::ordered_json events_json( sim_trace const& trace )
{
  auto j = nlohmann::ordered_json::array();
  for ( auto const& e : trace.events )
  {
    j.push_back( { { "t", e.time }, { "cell", e.cell }, { "kind", to_string( e.kind ) } } );
  }
  return j;
}

} // namespace pcmlogic
