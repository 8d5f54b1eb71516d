/*!
  \file compiler.hpp
  \brief Lowers Boolean netlists to crossbar programs over NOR, IMPLY, OR and NIMP
*/

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossbar.hpp"
#include "errors.hpp"
#include "gates.hpp"
#include "netlist.hpp"
#include "utils.hpp"

namespace pcmlogic
{

/*! \brief One native operation on virtual signals (one cell each).
 *
 * `kind` absent means the signal is a constant 0 produced by an Init alone.
 * `accumulate` means OUT already holds a value of the same signal and is not re-initialized.
 */
struct native_op
{
  std::optional<gate_kind> kind;
  std::size_t in1{ 0 };
  std::optional<std::size_t> in2;
  std::size_t out{ 0 };
  bool accumulate{ false };
};

struct native_dag
{
  /*! \brief signal names; the first n are the primary inputs */
  std::vector<std::string> signals;
  std::size_t num_inputs{ 0 };
  std::vector<native_op> ops;
  /*! \brief (output name, signal) */
  std::vector<std::pair<std::string, std::size_t>> outputs;

  std::size_t computation_steps() const
  {
    return static_cast<std::size_t>( std::count_if( ops.begin(), ops.end(), []( auto const& op ) { return op.kind.has_value(); } ) );
  }
};

/*! \brief Rewrites a netlist into native operations.
 *
 * NOT a     : IMPLY(a) into a fresh cell
 * AND(a,b)  : NOR(NOT a, NOT b)
 * NAND(a,b) : IMPLY(a) then IMPLY(b) accumulated into the same cell
 * XOR(a,b)  : NIMP(a,b) and NIMP(b,a) into one cell when one operand is dead afterwards,
 *             otherwise NIMP, NIMP into separate cells joined by OR
 * IMPLY(a,b): IMPLY(a) onto b's cell when b is dead afterwards, otherwise NOT(NIMP(a,b))
 *
 * An accumulating NIMP may set its IN1 cell when OUT is already 1 and IN1 is 0, so the
 * second NIMP of an XOR always takes the dead operand as IN1.
 */
inline native_dag lower( netlist const& n )
{
  native_dag dag;
  std::map<std::string, std::size_t> id;
  auto const fresh = [&]( std::string const& name ) {
    dag.signals.push_back( name );
    return dag.signals.size() - 1;
  };
  for ( auto const& i : n.inputs )
  {
    id[i] = fresh( i );
  }
  dag.num_inputs = n.inputs.size();

  /* last assignment index reading each netlist name; outputs never die */
  std::map<std::string, std::size_t> last_use;
  for ( std::size_t k = 0; k < n.assignments.size(); ++k )
  {
    for ( auto const& a : n.assignments[k].args )
    {
      last_use[a] = k;
    }
  }
  std::set<std::string> const outputs( n.outputs.begin(), n.outputs.end() );

  /* signal -> netlist names bound to it; a signal dies when all its names have */
  std::map<std::size_t, std::vector<std::string>> names_of;
  for ( auto const& i : n.inputs )
  {
    names_of[id[i]].push_back( i );
  }
  auto const dead_after = [&]( std::size_t sig, std::size_t k ) {
    for ( auto const& name : names_of[sig] )
    {
      if ( outputs.count( name ) )
      {
        return false;
      }
      if ( auto it = last_use.find( name ); it != last_use.end() && it->second > k )
      {
        return false;
      }
    }
    return true;
  };

  std::size_t temp = 0;
  auto const temporary = [&]() { return fresh( "_t" + std::to_string( temp++ ) ); };
  auto const emit = [&]( gate_kind kind, std::size_t in1, std::optional<std::size_t> in2, std::size_t out, bool acc ) {
    dag.ops.push_back( { kind, in1, in2, out, acc } );
  };
  auto const emit_zero = [&]( std::size_t out ) { dag.ops.push_back( { std::nullopt, 0, std::nullopt, out, false } ); };

  for ( std::size_t k = 0; k < n.assignments.size(); ++k )
  {
    auto const& as = n.assignments[k];
    auto const a = id.at( as.args[0] );
    auto const b = as.args.size() > 1 ? id.at( as.args[1] ) : a;
    bool const same = as.args.size() > 1 && a == b;
    std::size_t x = 0;
    auto const bind = [&]( std::size_t sig ) {
      x = sig;
      id[as.name] = sig;
      names_of[sig].push_back( as.name );
    };

    auto const op = as.op;
    if ( same && ( op == bool_op::OR || op == bool_op::AND ) )
    {
      bind( a );
      continue;
    }
    if ( same && ( op == bool_op::XOR || op == bool_op::NIMP ) )
    {
      bind( fresh( as.name ) );
      emit_zero( x );
      continue;
    }
    if ( op == bool_op::NOT || ( same && ( op == bool_op::NOR || op == bool_op::NAND ) ) )
    {
      bind( fresh( as.name ) );
      emit( gate_kind::IMPLY, a, std::nullopt, x, false );
      continue;
    }
    if ( same && op == bool_op::IMPLY )
    {
      auto const z = temporary();
      emit_zero( z );
      bind( fresh( as.name ) );
      emit( gate_kind::IMPLY, z, std::nullopt, x, false );
      continue;
    }

    switch ( op )
    {
    case bool_op::NOR:
      bind( fresh( as.name ) );
      emit( gate_kind::NOR, a, b, x, false );
      break;
    case bool_op::OR:
      bind( fresh( as.name ) );
      emit( gate_kind::OR, a, b, x, false );
      break;
    case bool_op::NIMP:
      bind( fresh( as.name ) );
      emit( gate_kind::NIMP, a, b, x, false );
      break;
    case bool_op::AND:
    {
      auto const na = temporary();
      emit( gate_kind::IMPLY, a, std::nullopt, na, false );
      auto const nb = temporary();
      emit( gate_kind::IMPLY, b, std::nullopt, nb, false );
      bind( fresh( as.name ) );
      emit( gate_kind::NOR, na, nb, x, false );
      break;
    }
    case bool_op::NAND:
      bind( fresh( as.name ) );
      emit( gate_kind::IMPLY, a, std::nullopt, x, false );
      emit( gate_kind::IMPLY, b, std::nullopt, x, true );
      break;
    case bool_op::XOR:
      if ( dead_after( b, k ) || dead_after( a, k ) )
      {
        auto const dead = dead_after( b, k ) ? b : a;
        auto const live = dead == b ? a : b;
        bind( fresh( as.name ) );
        emit( gate_kind::NIMP, live, dead, x, false );
        emit( gate_kind::NIMP, dead, live, x, true );
      }
      else
      {
        auto const t1 = temporary();
        emit( gate_kind::NIMP, a, b, t1, false );
        auto const t2 = temporary();
        emit( gate_kind::NIMP, b, a, t2, false );
        bind( fresh( as.name ) );
        emit( gate_kind::OR, t1, t2, x, false );
      }
      break;
    case bool_op::IMPLY:
      if ( dead_after( b, k ) )
      {
        emit( gate_kind::IMPLY, a, std::nullopt, b, true );
        bind( b );
      }
      else
      {
        auto const t = temporary();
        emit( gate_kind::NIMP, a, b, t, false );
        bind( fresh( as.name ) );
        emit( gate_kind::IMPLY, t, std::nullopt, x, false );
      }
      break;
    case bool_op::NOT:
      break;
    }
  }

  for ( auto const& o : n.outputs )
  {
    dag.outputs.emplace_back( o, id.at( o ) );
  }
  return dag;
}

struct compile_stats
{
  std::size_t computation_steps{ 0 };
  std::size_t init_ops{ 0 };
  std::size_t cells_used{ 0 };
  /*! \brief gate writes targeting each column, an upper bound on its set events per run */
  std::vector<std::size_t> writes_per_cell;
};

struct compiled_program
{
  program_listing listing;
  std::size_t row_width{ 0 };
  /*! \brief final cell of every netlist input and output name */
  std::map<std::string, cell_address> allocation;
  compile_stats stats;
};

/*! \brief Greedy single-row allocation: inputs take columns 0..n-1, each new cell the lowest free column.
 *
 * A cell is freed after the last operation reading it. Every non-accumulating write is
 * preceded by its own Init step. Throws RowOverflow with the peak cell count.
 */
inline compiled_program allocate( native_dag const& dag, std::size_t row_width )
{
  std::vector<std::size_t> last( dag.signals.size(), 0 );
  std::vector<bool> pinned( dag.signals.size(), false );
  for ( std::size_t k = 0; k < dag.ops.size(); ++k )
  {
    auto const& op = dag.ops[k];
    if ( op.kind )
    {
      last[op.in1] = k;
      if ( op.in2 )
      {
        last[*op.in2] = k;
      }
    }
    last[op.out] = std::max( last[op.out], k );
  }
  for ( auto const& [name, sig] : dag.outputs )
  {
    pinned[sig] = true;
  }

  std::vector<std::optional<std::size_t>> column( dag.signals.size() );
  std::vector<std::optional<std::size_t>> holder;
  std::size_t peak = 0;
  auto const take = [&]( std::size_t sig ) {
    auto it = std::find( holder.begin(), holder.end(), std::nullopt );
    auto const col = static_cast<std::size_t>( it - holder.begin() );
    if ( it == holder.end() )
    {
      holder.emplace_back( sig );
    }
    else
    {
      *it = sig;
    }
    column[sig] = col;
    std::size_t used = 0;
    for ( auto const& h : holder )
    {
      used += h.has_value() ? 1u : 0u;
    }
    peak = std::max( peak, used );
    return col;
  };
  auto const release_dead = [&]( std::size_t k ) {
    for ( auto& h : holder )
    {
      if ( h && !pinned[*h] && last[*h] < k )
      {
        h.reset();
      }
    }
  };

  for ( std::size_t i = 0; i < dag.num_inputs; ++i )
  {
    take( i );
  }
  compiled_program cp;
  cp.row_width = row_width;
  auto& steps = cp.listing.steps;
  for ( std::size_t k = 0; k < dag.ops.size(); ++k )
  {
    auto const& op = dag.ops[k];
    release_dead( k );
    if ( !op.accumulate )
    {
      auto const col = take( op.out );
      steps.push_back( { { init_op{ { { 0, col } } } } } );
      ++cp.stats.init_ops;
    }
    if ( !op.kind )
    {
      continue;
    }
    gate_op g{ *op.kind, 0, *column[op.in1], std::nullopt, *column[op.out] };
    if ( op.in2 )
    {
      g.in2 = *column[*op.in2];
    }
    steps.push_back( { { g } } );
    ++cp.stats.computation_steps;
  }

  if ( peak > row_width )
  {
    throw row_overflow_error( peak, row_width );
  }
  cp.stats.cells_used = holder.size();
  cp.stats.writes_per_cell.assign( holder.size(), 0 );
  for ( auto const& s : steps )
  {
    for ( auto const& op : s.ops )
    {
      if ( auto const* g = std::get_if<gate_op>( &op ) )
      {
        ++cp.stats.writes_per_cell[g->out];
      }
    }
  }
  for ( std::size_t i = 0; i < dag.num_inputs; ++i )
  {
    cp.listing.inputs.emplace_back( dag.signals[i], cell_address{ 0, *column[i] } );
    cp.allocation[dag.signals[i]] = { 0, *column[i] };
  }
  for ( auto const& [name, sig] : dag.outputs )
  {
    cp.listing.outputs.emplace_back( name, cell_address{ 0, *column[sig] } );
    cp.allocation[name] = { 0, *column[sig] };
  }
  return cp;
}

inline compiled_program compile( netlist const& n, std::size_t row_width )
{
  return allocate( lower( n ), row_width );
}

/*! \brief Copy of a single-row program moved to another row */
inline program_listing on_row( program_listing const& p, std::size_t row )
{
  auto moved = p;
  for ( auto& s : moved.steps )
  {
    for ( auto& op : s.ops )
    {
      if ( auto* g = std::get_if<gate_op>( &op ) )
      {
        g->row = row;
      }
      else
      {
        for ( auto& a : std::get<init_op>( op ).targets )
        {
          a.row = row;
        }
      }
    }
  }
  for ( auto* io : { &moved.inputs, &moved.outputs } )
  {
    for ( auto& [name, a] : *io )
    {
      a.row = row;
    }
  }
  return moved;
}

/*! \brief Merges step k of every program into one step. Programs must differ only in their rows.
 *
 * Input and output names of the result are suffixed with `@<index>` when more than one program is given.
 */
inline program_listing schedule_rows( std::vector<program_listing> const& programs )
{
  if ( programs.empty() )
  {
    return {};
  }
  if ( programs.size() == 1 )
  {
    return programs.front();
  }
  auto const mismatch = [&]( std::size_t i, std::string const& what ) {
    throw error( error_code::shape_mismatch, "program " + std::to_string( i ) + " differs from program 0 in " + what );
  };
  auto const& ref = programs.front();
  program_listing merged;
  merged.steps.resize( ref.steps.size() );
  std::set<std::size_t> rows_seen;
  for ( std::size_t i = 0; i < programs.size(); ++i )
  {
    auto const& p = programs[i];
    if ( p.steps.size() != ref.steps.size() )
    {
      mismatch( i, "step count" );
    }
    std::optional<std::size_t> row;
    for ( std::size_t k = 0; k < p.steps.size(); ++k )
    {
      auto const& s = p.steps[k];
      auto const& r = ref.steps[k];
      if ( s.ops.size() != r.ops.size() )
      {
        mismatch( i, "step " + std::to_string( k ) );
      }
      for ( std::size_t j = 0; j < s.ops.size(); ++j )
      {
        if ( s.ops[j].index() != r.ops[j].index() )
        {
          mismatch( i, "step " + std::to_string( k ) );
        }
        if ( auto const* g = std::get_if<gate_op>( &s.ops[j] ) )
        {
          auto const& rg = std::get<gate_op>( r.ops[j] );
          if ( g->kind != rg.kind || g->in1 != rg.in1 || g->in2 != rg.in2 || g->out != rg.out )
          {
            mismatch( i, "step " + std::to_string( k ) );
          }
          if ( row && *row != g->row )
          {
            mismatch( i, "row usage" );
          }
          row = g->row;
          merged.steps[k].ops.push_back( *g );
        }
        else
        {
          auto const& t = std::get<init_op>( s.ops[j] ).targets;
          auto const& rt = std::get<init_op>( r.ops[j] ).targets;
          if ( t.size() != rt.size() )
          {
            mismatch( i, "step " + std::to_string( k ) );
          }
          for ( std::size_t q = 0; q < t.size(); ++q )
          {
            if ( t[q].col != rt[q].col || ( row && *row != t[q].row ) )
            {
              mismatch( i, "step " + std::to_string( k ) );
            }
            row = t[q].row;
          }
          if ( i == 0 )
          {
            merged.steps[k].ops.push_back( init_op{ t } );
          }
          else
          {
            /* the first ops of a merged step are program 0's, in order */
            auto& mi = std::get<init_op>( merged.steps[k].ops[j] );
            mi.targets.insert( mi.targets.end(), t.begin(), t.end() );
          }
        }
      }
    }
    if ( row && !rows_seen.insert( *row ).second )
    {
      mismatch( i, "row (row " + std::to_string( *row ) + " used twice)" );
    }
    for ( auto const& [name, a] : p.inputs )
    {
      merged.inputs.emplace_back( name + "@" + std::to_string( i ), a );
    }
    for ( auto const& [name, a] : p.outputs )
    {
      merged.outputs.emplace_back( name + "@" + std::to_string( i ), a );
    }
  }
  /* gate ops first so every step reads gate, then init, like a single-row program */
  for ( auto& s : merged.steps )
  {
    std::stable_partition( s.ops.begin(), s.ops.end(), []( auto const& o ) { return std::holds_alternative<gate_op>( o ); } );
  }
  return merged;
}

struct vector_mismatch
{
  std::vector<bool> inputs;
  std::vector<bool> expected;
  std::vector<std::optional<bool>> actual;
};

struct verify_report
{
  std::size_t vectors{ 0 };
  bool exhaustive{ true };
  std::size_t computation_steps{ 0 };
  std::vector<vector_mismatch> mismatches;

  bool pass() const { return mismatches.empty(); }
};

struct verify_options
{
  exec_mode mode{ exec_mode::functional };
  circuit_params circuit{};
  device_params device{};
  /*! \brief input vectors evaluated side by side, one per row */
  std::size_t rows_per_batch{ 64 };
  std::size_t exhaustive_limit{ 16 };
  std::size_t sampled_vectors{ 4096 };
  std::uint64_t seed{ 1 };
};

/*! \brief Runs the compiled program on every input vector and compares outputs with the reference evaluator.
 *
 * Up to `exhaustive_limit` inputs all vectors are checked, beyond that `sampled_vectors`
 * uniformly drawn ones. Inputs are written by write-verify in circuit mode and loaded ideally
 * in functional mode.
 */
inline verify_report verify_exhaustive( netlist const& n, compiled_program const& compiled, verify_options const& opt = {} )
{
  verify_report report;
  std::size_t const k = n.inputs.size();
  std::vector<std::vector<bool>> vectors;
  if ( k <= opt.exhaustive_limit )
  {
    for ( std::uint64_t v = 0; v < ( std::uint64_t{ 1 } << k ); ++v )
    {
      std::vector<bool> bits( k );
      for ( std::size_t i = 0; i < k; ++i )
      {
        bits[i] = ( v >> i ) & 1u;
      }
      vectors.push_back( std::move( bits ) );
    }
  }
  else
  {
    report.exhaustive = false;
    std::mt19937_64 rng( opt.seed );
    for ( std::size_t s = 0; s < opt.sampled_vectors; ++s )
    {
      std::vector<bool> bits( k );
      for ( std::size_t i = 0; i < k; ++i )
      {
        bits[i] = ( rng() >> 17 ) & 1u;
      }
      vectors.push_back( std::move( bits ) );
    }
  }
  report.vectors = vectors.size();
  report.computation_steps = compiled.stats.computation_steps;

  std::map<std::string, std::size_t> in_col;
  for ( auto const& [name, a] : compiled.listing.inputs )
  {
    in_col[name] = a.col;
  }
  std::vector<std::size_t> out_col;
  for ( auto const& [name, a] : compiled.listing.outputs )
  {
    out_col.push_back( a.col );
  }
  std::size_t const width = std::max<std::size_t>( compiled.stats.cells_used, 1 );
  std::size_t const batch = std::max<std::size_t>( opt.rows_per_batch, 1 );

  for ( std::size_t start = 0; start < vectors.size(); start += batch )
  {
    std::size_t const rows = std::min( batch, vectors.size() - start );
    crossbar x( rows, width, opt.device );
    std::vector<program_listing> per_row;
    for ( std::size_t r = 0; r < rows; ++r )
    {
      auto const& bits = vectors[start + r];
      for ( std::size_t i = 0; i < k; ++i )
      {
        cell_address const a{ r, in_col.at( n.inputs[i] ) };
        if ( opt.mode == exec_mode::functional )
        {
          x.load( a, bits[i] );
        }
        else
        {
          x.write( a, bits[i] );
        }
      }
      per_row.push_back( on_row( compiled.listing, r ) );
    }
    run_program( x, schedule_rows( per_row ).steps, opt.mode, opt.circuit );
    for ( std::size_t r = 0; r < rows; ++r )
    {
      auto const& bits = vectors[start + r];
      auto const expected = evaluate( n, bits );
      std::vector<std::optional<bool>> actual;
      bool ok = true;
      for ( std::size_t o = 0; o < out_col.size(); ++o )
      {
        auto const l = x.level( { r, out_col[o] } );
        actual.push_back( l == logic_level::indeterminate ? std::nullopt : std::optional<bool>( l == logic_level::one ) );
        ok = ok && actual.back() == std::optional<bool>( expected[o] );
      }
      if ( !ok )
      {
        report.mismatches.push_back( { bits, expected, actual } );
      }
    }
  }
  return report;
}

inline nlohmann::ordered_json to_json( compiled_program const& cp )
{
  nlohmann::ordered_json j;
  j["row_width"] = cp.row_width;
  j["computation_steps"] = cp.stats.computation_steps;
  j["init_ops"] = cp.stats.init_ops;
  j["cells_used"] = cp.stats.cells_used;
  j["writes_per_cell"] = cp.stats.writes_per_cell;
  auto& alloc = j["allocation"] = nlohmann::ordered_json::object();
  for ( auto const& [name, a] : cp.listing.inputs )
  {
    alloc[name] = { a.row, a.col };
  }
  for ( auto const& [name, a] : cp.listing.outputs )
  {
    alloc[name] = { a.row, a.col };
  }
  return j;
}

inline nlohmann::ordered_json to_json( verify_report const& r )
{
  nlohmann::ordered_json j;
  j["vectors"] = r.vectors;
  j["exhaustive"] = r.exhaustive;
  j["computation_steps"] = r.computation_steps;
  j["pass"] = r.pass();
  auto& m = j["mismatches"] = nlohmann::ordered_json::array();
  for ( auto const& v : r.mismatches )
  {
    auto bits = []( auto const& vec ) {
      std::string s;
      for ( auto const& b : vec )
      {
        if constexpr ( std::is_same_v<std::decay_t<decltype( b )>, std::optional<bool>> )
        {
          s += b ? ( *b ? '1' : '0' ) : 'X';
        }
        else
        {
          s += b ? '1' : '0';
        }
      }
      return s;
    };
    m.push_back( { { "inputs", bits( v.inputs ) }, { "expected", bits( v.expected ) }, { "actual", bits( v.actual ) } } );
  }
  return j;
}

} // namespace pcmlogic
