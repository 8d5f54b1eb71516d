/*!
  \file crossbar.hpp
  \brief Rows x columns PCM array with one shared bottom-electrode line per row
*/

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "device.hpp"
#include "errors.hpp"
#include "gates.hpp"
#include "utils.hpp"

namespace pcmlogic
{

/*! \brief Zero-based row-major cell address */
struct cell_address
{
  std::size_t row;
  std::size_t col;

  auto operator<=>( cell_address const& ) const = default;
};

/*! \brief Resets the targets to logical 0 */
struct init_op
{
  std::vector<cell_address> targets;

  bool operator==( init_op const& ) const = default;
};

/*! \brief One gate on a single row; in2 is absent for IMPLY */
struct gate_op
{
  gate_kind kind;
  std::size_t row;
  std::size_t in1;
  std::optional<std::size_t> in2;
  std::size_t out;

  bool operator==( gate_op const& ) const = default;
};

using micro_op = std::variant<init_op, gate_op>;

/*! \brief Micro-ops applied simultaneously */
struct array_step
{
  std::vector<micro_op> ops;

  bool operator==( array_step const& ) const = default;

  std::size_t gate_count() const
  {
    return static_cast<std::size_t>(
        std::count_if( ops.begin(), ops.end(), []( auto const& op ) { return std::holds_alternative<gate_op>( op ); } ) );
  }
};

using program = std::vector<array_step>;

/*! \brief Role of a column's TE driver during the most recent gate step */
enum class column_driver : std::uint8_t
{
  idle,
  driven,
  grounded,
  floating
};

struct cell_event
{
  cell_address cell;
  double time;
  switch_event_kind kind;
};

struct step_report
{
  std::size_t gates{ 0 };
  std::size_t init_targets{ 0 };
  std::size_t set_events{ 0 };
  std::vector<cell_event> events;
};

class crossbar
{
public:
  crossbar( std::size_t rows, std::size_t cols, device_params const& params = {} )
      : rows_( rows ), cols_( cols )
  {
    if ( rows < 1 || cols < 1 )
    {
      throw error( error_code::invalid_argument, "a crossbar needs at least one row and one column" );
    }
    params.validate();
    cells_.assign( rows * cols, make_cell( false, params ) );
    row_resistor_.assign( rows, false );
    column_drivers_.assign( cols, column_driver::idle );
  }

  /*! \brief Every cell sampled independently with seed derive_seed(seed, {row, col}); all start amorphous. */
  static crossbar create( std::size_t rows, std::size_t cols, device_params const& nominal = {},
                          variability_spec const& variability = variability_spec::none(), std::uint64_t seed = 0 )
  {
    crossbar x( rows, cols, nominal );
    for ( std::size_t r = 0; r < rows; ++r )
    {
      for ( std::size_t c = 0; c < cols; ++c )
      {
        x.cells_[r * cols + c] = make_cell( false, sample_device( nominal, variability, derive_seed( seed, { r, c } ) ) );
      }
    }
    return x;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  cell_state const& cell( cell_address a ) const { return cells_[offset( a )]; }

  /*! \brief Program-and-verify write */
  write_result write( cell_address a, bool bit, int max_attempts = 10, write_params const& params = {} )
  {
    auto r = write_verify( cells_[offset( a )], bit, max_attempts, params );
    cells_[offset( a )] = r.cell;
    return r;
  }

  /*! \brief Ideal write: sets the phase directly without programming pulses or switch counting */
  void load( cell_address a, bool bit )
  {
    auto& c = cells_[offset( a )];
    c = make_cell( bit, c.params );
  }

  double resistance( cell_address a ) const { return read_resistance( cells_[offset( a )] ); }

  logic_level level( cell_address a ) const { return read_logic( cells_[offset( a )] ); }

  /*! \brief Non-destructive read */
  bool read( cell_address a ) const
  {
    auto const l = level( a );
    if ( l == logic_level::indeterminate )
    {
      throw error( error_code::indeterminate_state, "cell (" + std::to_string( a.row ) + "," + std::to_string( a.col ) +
                                                        ") reads between the bands" );
    }
    return l == logic_level::one;
  }

  bool row_resistor_attached( std::size_t row ) const { return row_resistor_.at( row ); }
  column_driver driver( std::size_t col ) const { return column_drivers_.at( col ); }

  std::vector<logic_level> logic_map() const
  {
    std::vector<logic_level> m;
    m.reserve( cells_.size() );
    for ( auto const& c : cells_ )
    {
      m.push_back( read_logic( c ) );
    }
    return m;
  }

  std::uint64_t total_switch_count() const
  {
    std::uint64_t s = 0;
    for ( auto const& c : cells_ )
    {
      s += c.switch_count;
    }
    return s;
  }

  std::uint64_t max_switch_count() const
  {
    std::uint64_t s = 0;
    for ( auto const& c : cells_ )
    {
      s = std::max( s, c.switch_count );
    }
    return s;
  }

  void check( cell_address a ) const
  {
    if ( a.row >= rows_ || a.col >= cols_ )
    {
      throw error( error_code::invalid_argument, "address (" + std::to_string( a.row ) + "," + std::to_string( a.col ) +
                                                     ") outside a " + std::to_string( rows_ ) + "x" +
                                                     std::to_string( cols_ ) + " array" );
    }
  }

private:
  std::size_t offset( cell_address a ) const
  {
    check( a );
    return a.row * cols_ + a.col;
  }

  friend step_report execute_step( crossbar&, array_step const&, exec_mode, circuit_params const& );

  std::size_t rows_;
  std::size_t cols_;
  std::vector<cell_state> cells_;
  std::vector<bool> row_resistor_;
  std::vector<column_driver> column_drivers_;
};

/*! \brief Checks the step invariants against an array shape; throws InvalidStep. */
inline void validate_step( array_step const& s, std::size_t rows, std::size_t cols )
{
  auto const bad = []( std::string const& msg ) { throw error( error_code::invalid_step, msg ); };
  std::optional<gate_op> first;
  std::set<std::size_t> gate_rows;
  std::set<cell_address> operands;
  for ( auto const& op : s.ops )
  {
    auto const* g = std::get_if<gate_op>( &op );
    if ( !g )
    {
      continue;
    }
    if ( has_second_input( g->kind ) != g->in2.has_value() )
    {
      bad( std::string( to_string( g->kind ) ) + ( g->in2 ? " takes no in2 operand" : " requires an in2 operand" ) );
    }
    if ( g->row >= rows || g->in1 >= cols || g->out >= cols || ( g->in2 && *g->in2 >= cols ) )
    {
      bad( "gate operand outside the array" );
    }
    if ( g->in1 == g->out || ( g->in2 && ( *g->in2 == g->in1 || *g->in2 == g->out ) ) )
    {
      bad( "gate operands must be distinct columns" );
    }
    if ( !first )
    {
      first = *g;
    }
    else if ( g->kind != first->kind || g->in1 != first->in1 || g->in2 != first->in2 || g->out != first->out )
    {
      bad( "all gates in a step must share kind and columns" );
    }
    if ( !gate_rows.insert( g->row ).second )
    {
      bad( "two gates on row " + std::to_string( g->row ) );
    }
    operands.insert( { g->row, g->in1 } );
    operands.insert( { g->row, g->out } );
    if ( g->in2 )
    {
      operands.insert( { g->row, *g->in2 } );
    }
  }
  for ( auto const& op : s.ops )
  {
    auto const* i = std::get_if<init_op>( &op );
    if ( !i )
    {
      continue;
    }
    for ( auto const& a : i->targets )
    {
      if ( a.row >= rows || a.col >= cols )
      {
        bad( "init target outside the array" );
      }
      if ( operands.count( a ) )
      {
        bad( "init target (" + std::to_string( a.row ) + "," + std::to_string( a.col ) + ") is also a gate operand" );
      }
    }
  }
}

/*! \brief Applies one step. All-or-error: on failure the array is left unchanged.
 *
 * Circuit mode solves each gate row independently with the unselected columns floating.
 * Gates accumulate into OUT; the caller is responsible for initializing it.
 */
inline step_report execute_step( crossbar& x, array_step const& s, exec_mode mode, circuit_params const& params = {} )
{
  validate_step( s, x.rows_, x.cols_ );
  step_report report;
  auto cells = x.cells_;
  auto const at = [&]( std::size_t r, std::size_t c ) -> cell_state& { return cells[r * x.cols_ + c]; };

  for ( auto const& op : s.ops )
  {
    auto const* i = std::get_if<init_op>( &op );
    if ( !i )
    {
      continue;
    }
    std::set<cell_address> const unique( i->targets.begin(), i->targets.end() );
    for ( auto const& a : unique )
    {
      auto& c = at( a.row, a.col );
      c = mode == exec_mode::functional ? make_cell( false, c.params ) : write_verify( c, false ).cell;
      c.switch_count = x.cells_[a.row * x.cols_ + a.col].switch_count;
      ++report.init_targets;
    }
  }

  std::vector<gate_op> gates;
  for ( auto const& op : s.ops )
  {
    if ( auto const* g = std::get_if<gate_op>( &op ) )
    {
      gates.push_back( *g );
    }
  }
  report.gates = gates.size();

  std::vector<std::vector<cell_event>> row_events( gates.size() );
  std::vector<std::array<cell_state, 3>> results( gates.size() );
  auto cp = params;
  cp.allow_initialized_output = true;
  cp.policy.record_samples = false;

  auto const run_row = [&]( std::size_t k ) {
    auto const& g = gates[k];
    std::array<std::size_t, 3> const cols{ g.in1, g.in2.value_or( g.in1 ), g.out };
    std::array<cell_state, 3> operand{ at( g.row, g.in1 ), g.in2 ? at( g.row, *g.in2 ) : at( g.row, g.in1 ),
                                       at( g.row, g.out ) };
    if ( mode == exec_mode::functional )
    {
      auto const bit = [&]( cell_state const& c ) {
        auto const l = read_logic( c );
        if ( l == logic_level::indeterminate )
        {
          throw error( error_code::indeterminate_state, "gate operand reads between the bands" );
        }
        return l == logic_level::one;
      };
      bool const old = bit( operand[2] );
      std::optional<bool> in2;
      if ( g.in2 )
      {
        in2 = bit( operand[1] );
      }
      bool const out = execute_gate_functional( g.kind, bit( operand[0] ), in2, old );
      if ( out && !old )
      {
        auto const count = operand[2].switch_count;
        operand[2] = make_cell( true, operand[2].params );
        operand[2].switch_count = count + 1;
        row_events[k].push_back( { { g.row, g.out }, 0.0, switch_event_kind::set } );
      }
      results[k] = operand;
      return;
    }
    auto const r = execute_gate_circuit( g.kind, operand, cp );
    results[k] = r.cells;
    for ( auto const& e : r.trace.events )
    {
      if ( e.cell == index( terminal::in2 ) && !g.in2 )
      {
        continue;
      }
      row_events[k].push_back( { { g.row, cols[e.cell] }, e.time, e.kind } );
    }
  };
  parallel_for( gates.size(), run_row, mode == exec_mode::circuit ? 0u : 1u );

  for ( std::size_t k = 0; k < gates.size(); ++k )
  {
    auto const& g = gates[k];
    at( g.row, g.in1 ) = results[k][0];
    if ( g.in2 )
    {
      at( g.row, *g.in2 ) = results[k][1];
    }
    at( g.row, g.out ) = results[k][2];
    for ( auto const& e : row_events[k] )
    {
      report.events.push_back( e );
      report.set_events += e.kind == switch_event_kind::set ? 1u : 0u;
    }
  }

  x.cells_ = std::move( cells );
  if ( !gates.empty() )
  {
    auto const cfg = make_gate_config( gates.front().kind, params.gate );
    std::fill( x.row_resistor_.begin(), x.row_resistor_.end(), false );
    std::fill( x.column_drivers_.begin(), x.column_drivers_.end(), column_driver::floating );
    for ( auto const& g : gates )
    {
      x.row_resistor_[g.row] = std::holds_alternative<resistor_be>( cfg.be );
    }
    auto const role = [&]( terminal t ) {
      auto const& d = cfg.drive( t );
      return is_floating( d ) ? column_driver::floating
                              : ( std::holds_alternative<grounded_drive>( d ) ? column_driver::grounded : column_driver::driven );
    };
    auto const& g = gates.front();
    x.column_drivers_[g.in1] = role( terminal::in1 );
    if ( g.in2 )
    {
      x.column_drivers_[*g.in2] = role( terminal::in2 );
    }
    x.column_drivers_[g.out] = role( terminal::out );
  }
  return report;
}

struct program_report
{
  std::size_t steps{ 0 };
  /*! \brief steps containing at least one gate; Init-only steps are not counted */
  std::size_t computation_steps{ 0 };
  std::size_t init_targets{ 0 };
  std::size_t set_events{ 0 };
  std::uint64_t max_switch_count{ 0 };
  std::vector<step_report> per_step;
};

inline program_report run_program( crossbar& x, program const& p, exec_mode mode, circuit_params const& params = {} )
{
  program_report report;
  for ( auto const& s : p )
  {
    auto r = execute_step( x, s, mode, params );
    ++report.steps;
    report.computation_steps += r.gates > 0 ? 1u : 0u;
    report.init_targets += r.init_targets;
    report.set_events += r.set_events;
    report.per_step.push_back( std::move( r ) );
  }
  report.max_switch_count = x.max_switch_count();
  return report;
}

/*! \brief Program text plus named input/output cells */
struct program_listing
{
  pcmlogic::program steps;
  std::vector<std::pair<std::string, cell_address>> inputs;
  std::vector<std::pair<std::string, cell_address>> outputs;
};

namespace detail
{

class line_scanner
{
public:
  line_scanner( std::string_view line, std::size_t line_no ) : line_( line ), line_no_( line_no ) {}

  [[noreturn]] void fail( std::string const& msg ) const { throw parse_error( error_code::syntax_error, line_no_, pos_ + 1, msg ); }

  void skip_ws()
  {
    while ( pos_ < line_.size() && std::isspace( static_cast<unsigned char>( line_[pos_] ) ) )
    {
      ++pos_;
    }
  }

  bool done()
  {
    skip_ws();
    return pos_ >= line_.size();
  }

  std::string word()
  {
    skip_ws();
    auto const start = pos_;
    while ( pos_ < line_.size() && !std::isspace( static_cast<unsigned char>( line_[pos_] ) ) && line_[pos_] != ',' &&
            line_[pos_] != '=' )
    {
      ++pos_;
    }
    if ( start == pos_ )
    {
      fail( "expected a word" );
    }
    return std::string( line_.substr( start, pos_ - start ) );
  }

  std::size_t number()
  {
    skip_ws();
    auto const start = pos_;
    std::size_t v = 0;
    while ( pos_ < line_.size() && std::isdigit( static_cast<unsigned char>( line_[pos_] ) ) )
    {
      v = v * 10 + static_cast<std::size_t>( line_[pos_] - '0' );
      ++pos_;
    }
    if ( start == pos_ )
    {
      fail( "expected a non-negative integer" );
    }
    return v;
  }

  void expect( char c )
  {
    skip_ws();
    if ( pos_ >= line_.size() || line_[pos_] != c )
    {
      fail( std::string( "expected '" ) + c + "'" );
    }
    ++pos_;
  }

  bool peek( char c )
  {
    skip_ws();
    return pos_ < line_.size() && line_[pos_] == c;
  }

  cell_address address()
  {
    auto const r = number();
    expect( ',' );
    return { r, number() };
  }

  std::size_t column() { return pos_; }

private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_{ 0 };
};

} // namespace detail

/*! \brief Parses the program text format.
 *
 * One micro-op per line: `INIT r,c [r,c ...]` or `GATE <KIND> row=<r> in1=<c> in2=<c|-> out=<c>`.
 * Steps are separated by `---`. `@input name r,c` and `@output name r,c` name cells.
 * `#` starts a comment.
 */
inline program_listing parse_program( std::string_view text )
{
  program_listing listing;
  array_step current;
  bool pending = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while ( pos <= text.size() )
  {
    auto end = text.find( '\n', pos );
    if ( end == std::string_view::npos )
    {
      end = text.size();
    }
    auto line = text.substr( pos, end - pos );
    pos = end + 1;
    ++line_no;
    if ( auto const hash = line.find( '#' ); hash != std::string_view::npos )
    {
      line = line.substr( 0, hash );
    }
    detail::line_scanner sc( line, line_no );
    if ( sc.done() )
    {
      continue;
    }
    auto const head = sc.word();
    if ( head == "---" )
    {
      listing.steps.push_back( std::move( current ) );
      current = {};
      pending = false;
    }
    else if ( head == "INIT" )
    {
      init_op op;
      do
      {
        op.targets.push_back( sc.address() );
      } while ( !sc.done() );
      current.ops.emplace_back( std::move( op ) );
      pending = true;
    }
    else if ( head == "GATE" )
    {
      auto const kind_col = sc.column();
      auto const kind = parse_gate_kind( sc.word() );
      if ( !kind )
      {
        throw parse_error( error_code::syntax_error, line_no, kind_col + 2, "unknown gate kind" );
      }
      std::map<std::string, std::optional<std::size_t>> fields;
      while ( !sc.done() )
      {
        auto const key = sc.word();
        if ( key != "row" && key != "in1" && key != "in2" && key != "out" )
        {
          sc.fail( "unknown field '" + key + "'" );
        }
        sc.expect( '=' );
        if ( key == "in2" && sc.peek( '-' ) )
        {
          sc.expect( '-' );
          fields[key] = std::nullopt;
        }
        else
        {
          fields[key] = sc.number();
        }
      }
      for ( auto const* k : { "row", "in1", "in2", "out" } )
      {
        if ( !fields.count( k ) || ( std::string_view( k ) != "in2" && !fields[k] ) )
        {
          sc.fail( std::string( "missing field '" ) + k + "'" );
        }
      }
      current.ops.emplace_back( gate_op{ *kind, *fields["row"], *fields["in1"], fields["in2"], *fields["out"] } );
      pending = true;
    }
    else if ( head == "@input" || head == "@output" )
    {
      auto name = sc.word();
      auto const a = sc.address();
      if ( !sc.done() )
      {
        sc.fail( "unexpected text after address" );
      }
      ( head == "@input" ? listing.inputs : listing.outputs ).emplace_back( std::move( name ), a );
    }
    else
    {
      throw parse_error( error_code::syntax_error, line_no, 1, "unknown directive '" + head + "'" );
    }
  }
  if ( pending )
  {
    listing.steps.push_back( std::move( current ) );
  }
  return listing;
}

inline std::string format_program( program_listing const& listing )
{
  std::ostringstream os;
  for ( auto const& [name, a] : listing.inputs )
  {
    os << "@input " << name << ' ' << a.row << ',' << a.col << '\n';
  }
  for ( auto const& [name, a] : listing.outputs )
  {
    os << "@output " << name << ' ' << a.row << ',' << a.col << '\n';
  }
  for ( std::size_t k = 0; k < listing.steps.size(); ++k )
  {
    if ( k > 0 )
    {
      os << "---\n";
    }
    for ( auto const& op : listing.steps[k].ops )
    {
      if ( auto const* i = std::get_if<init_op>( &op ) )
      {
        os << "INIT";
        for ( auto const& a : i->targets )
        {
          os << ' ' << a.row << ',' << a.col;
        }
        os << '\n';
      }
      else
      {
        auto const& g = std::get<gate_op>( op );
        os << "GATE " << to_string( g.kind ) << " row=" << g.row << " in1=" << g.in1 << " in2=";
        if ( g.in2 )
        {
          os << *g.in2;
        }
        else
        {
          os << '-';
        }
        os << " out=" << g.out << '\n';
      }
    }
  }
  return os.str();
}

/*! \brief One line per row of logic values (0, 1 or X), comma separated */
inline void write_logic_csv( std::ostream& os, crossbar const& x )
{
  for ( std::size_t r = 0; r < x.rows(); ++r )
  {
    for ( std::size_t c = 0; c < x.cols(); ++c )
    {
      os << ( c ? "," : "" ) << to_char( x.level( { r, c } ) );
    }
    os << '\n';
  }
}

inline nlohmann::ordered_json resistances_json( crossbar const& x )
{
  nlohmann::ordered_json j;
  j["rows"] = x.rows();
  j["cols"] = x.cols();
  auto& m = j["resistance_ohm"] = nlohmann::ordered_json::array();
  for ( std::size_t r = 0; r < x.rows(); ++r )
  {
    auto row = nlohmann::ordered_json::array();
    for ( std::size_t c = 0; c < x.cols(); ++c )
    {
      row.push_back( x.resistance( { r, c } ) );
    }
    m.push_back( std::move( row ) );
  }
  return j;
}

} // namespace pcmlogic
