/*!
  \file pcmlogic.hpp
  \brief All public headers
*/

#pragma once

#include "characterize.hpp"
#include "compiler.hpp"
#include "config.hpp"
#include "crossbar.hpp"
#include "device.hpp"
#include "errors.hpp"
#include "gates.hpp"
#include "margins.hpp"
#include "monte_carlo.hpp"
#include "netlist.hpp"
#include "solver.hpp"
#include "trace_io.hpp"
#include "utils.hpp"
