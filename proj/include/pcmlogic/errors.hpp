/*!
  \file errors.hpp
  \brief Error type shared by all pcmlogic modules
*/

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pcmlogic
{

enum class error_code
{
  invalid_argument,
  resolution_too_coarse,
  sampling_failed,
  isolated_node,
  non_convergence,
  output_not_initialized,
  indeterminate_state,
  verify_failed,
  invalid_step,
  syntax_error,
  undefined_signal,
  cyclic_definition,
  duplicate_name,
  row_overflow,
  shape_mismatch,
  config_error
};

inline std::string_view to_string( error_code code )
{
  switch ( code )
  {
  case error_code::invalid_argument:       return "InvalidArgument";
  case error_code::resolution_too_coarse:  return "ResolutionTooCoarse";
  case error_code::sampling_failed:        return "SamplingFailed";
  case error_code::isolated_node:          return "IsolatedNode";
  case error_code::non_convergence:        return "NonConvergence";
  case error_code::output_not_initialized: return "OutputNotInitialized";
  case error_code::indeterminate_state:    return "IndeterminateState";
  case error_code::verify_failed:          return "VerifyFailed";
  case error_code::invalid_step:           return "InvalidStep";
  case error_code::syntax_error:           return "SyntaxError";
  case error_code::undefined_signal:       return "UndefinedSignal";
  case error_code::cyclic_definition:      return "CyclicDefinition";
  case error_code::duplicate_name:         return "DuplicateName";
  case error_code::row_overflow:           return "RowOverflow";
  case error_code::shape_mismatch:         return "ShapeMismatch";
  case error_code::config_error:           return "ConfigError";
  }
  return "Unknown";
}

class error : public std::runtime_error
{
public:
  error( error_code code, std::string const& message )
      : std::runtime_error( std::string( to_string( code ) ) + ": " + message ),
        code_( code )
  {
  }

  error_code code() const noexcept { return code_; }

private:
  error_code code_;
};

/*! \brief Error raised while reading netlist or program text; carries a source position. */
class parse_error : public error
{
public:
  parse_error( error_code code, std::size_t line, std::size_t column, std::string const& message )
      : error( code, "line " + std::to_string( line ) + ", column " + std::to_string( column ) + ": " + message ),
        line_( line ), column_( column )
  {
  }

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class row_overflow_error : public error
{
public:
  row_overflow_error( std::size_t peak, std::size_t row_width )
      : error( error_code::row_overflow,
               "program needs " + std::to_string( peak ) + " live cells but the row has " + std::to_string( row_width ) ),
        peak_( peak )
  {
  }

  /*! \brief Peak number of simultaneously live cells in the allocation. */
  std::size_t peak() const noexcept { return peak_; }

private:
  std::size_t peak_;
};

} // namespace pcmlogic
