#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include <pcmlogic/netlist.hpp>

namespace pcmlogic::testing
{

/* inputs in [1, max_inputs], assignments in [1, max_gates]; operands drawn from all earlier signals */
inline netlist random_netlist( std::uint64_t seed, std::size_t max_inputs = 8, std::size_t max_gates = 25 )
{
  std::mt19937_64 rng( seed );
  auto const pick = [&]( std::size_t lo, std::size_t hi ) {
    return std::uniform_int_distribution<std::size_t>( lo, hi )( rng );
  };
  netlist n;
  std::vector<std::string> signals;
  for ( std::size_t i = 0, k = pick( 1, max_inputs ); i < k; ++i )
  {
    n.inputs.push_back( "i" + std::to_string( i ) );
    signals.push_back( n.inputs.back() );
  }
  for ( std::size_t g = 0, k = pick( 1, max_gates ); g < k; ++g )
  {
    auto const op = all_bool_ops[pick( 0, all_bool_ops.size() - 1 )];
    assignment a{ "g" + std::to_string( g ), op, {}, g + 2 };
    for ( std::size_t j = 0; j < arity( op ); ++j )
    {
      a.args.push_back( signals[pick( 0, signals.size() - 1 )] );
    }
    n.assignments.push_back( a );
    signals.push_back( a.name );
  }
  n.outputs.push_back( signals.back() );
  for ( std::size_t i = 0; i + 1 < signals.size(); ++i )
  {
    if ( pick( 0, 5 ) == 0 )
    {
      n.outputs.push_back( signals[i] );
    }
  }
  return n;
}

} // namespace pcmlogic::testing
