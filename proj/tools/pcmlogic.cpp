// Command-line workbench: characterize, gate, margins, montecarlo, compile, run.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <pcmlogic/pcmlogic.hpp>

namespace fs = std::filesystem;
using namespace pcmlogic;

namespace
{

enum exit_code : int
{
  exit_ok = 0,
  exit_runtime = 1,
  exit_usage = 2,
  exit_config = 3,
  exit_verify = 4,
  exit_margin = 5
};

struct usage_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct global_options
{
  std::string config_path;
  std::string preset;
  std::uint64_t seed{ 1 };
  std::string out_dir{ "pcmlogic-out" };
};

std::string read_file( std::string const& path )
{
  std::ifstream in( path );
  if ( !in )
  {
    throw usage_error( "cannot open " + path );
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class workspace
{
public:
  workspace( global_options const& g, std::string subcommand ) : g_( g ), subcommand_( std::move( subcommand ) )
  {
    nlohmann::json j = nlohmann::json::object();
    if ( !g.config_path.empty() )
    {
      try
      {
        j = nlohmann::json::parse( read_file( g.config_path ) );
      }
      catch ( nlohmann::json::parse_error const& e )
      {
        throw error( error_code::config_error, g.config_path + ": " + e.what() );
      }
      catch ( usage_error const& e )
      {
        throw error( error_code::config_error, e.what() );
      }
    }
    if ( !g.preset.empty() && j.is_object() )
    {
      j["preset"] = g.preset;
    }
    config = config_from_json( j );
    fs::create_directories( g.out_dir );
  }

  fs::path file( std::string const& name ) const { return fs::path( g_.out_dir ) / name; }

  void write_text( std::string const& name, std::string const& text ) const
  {
    std::ofstream( file( name ), std::ios::binary ) << text;
  }

  void write_json( std::string const& name, nlohmann::ordered_json const& j ) const { write_text( name, j.dump( 2 ) + "\n" ); }

  /* every run echoes its effective parameters */
  void write_manifest( nlohmann::ordered_json const& args ) const
  {
    nlohmann::ordered_json m;
    m["subcommand"] = subcommand_;
    m["config_path"] = g_.config_path;
    m["preset"] = config.preset;
    m["seed"] = g_.seed;
    m["out_dir"] = g_.out_dir;
    m["arguments"] = args;
    m["config"] = to_json( config );
    write_json( "manifest.json", m );
  }

  workbench_config config;

private:
  global_options g_;
  std::string subcommand_;
};

bool parse_bit( std::string const& s, char const* what )
{
  if ( s == "0" )
  {
    return false;
  }
  if ( s == "1" )
  {
    return true;
  }
  throw usage_error( std::string( what ) + " must be 0 or 1" );
}

gate_kind parse_kind( std::string const& s )
{
  auto k = parse_gate_kind( s );
  if ( !k )
  {
    throw usage_error( "unknown gate '" + s + "' (expected NOR, IMPLY, OR or NIMP)" );
  }
  return *k;
}

std::vector<gate_kind> parse_kinds( std::string const& s )
{
  if ( s == "all" || s == "ALL" )
  {
    return { all_gate_kinds.begin(), all_gate_kinds.end() };
  }
  return { parse_kind( s ) };
}

exec_mode parse_mode( std::string const& s )
{
  if ( s == "functional" )
  {
    return exec_mode::functional;
  }
  if ( s == "circuit" )
  {
    return exec_mode::circuit;
  }
  throw usage_error( "mode must be functional or circuit" );
}

std::string fmt( char const* f, double v )
{
  char buf[64];
  std::snprintf( buf, sizeof( buf ), f, v );
  return buf;
}

/* ---- characterize ---- */

struct characterize_options
{
  double set_max{ 2.0 };
  double set_step{ 0.05 };
  double reset_max{ 4.0 };
  double reset_step{ 0.1 };
  std::uint64_t cycles{ endurance_warning_cycles };
};

int run_characterize( global_options const& g, characterize_options const& o )
{
  workspace ws( g, "characterize" );
  auto const& d = ws.config.device;
  write_params const wp{};

  auto set = sweep_params::set_sweep();
  set.stop = o.set_max;
  set.increment = o.set_step;
  auto reset = sweep_params::reset_sweep();
  reset.stop = o.reset_max;
  reset.increment = o.reset_step;
  auto const set_points = pulse_sweep( d, false, set );
  auto const reset_points = pulse_sweep( d, true, reset );
  {
    std::ostringstream os;
    write_sweep_csv( os, set_points );
    ws.write_text( "set_sweep.csv", os.str() );
  }
  {
    std::ostringstream os;
    write_sweep_csv( os, reset_points );
    ws.write_text( "reset_sweep.csv", os.str() );
  }
  {
    std::ostringstream os;
    write_transient_csv( os, set_transient( d, wp.set_pulse ) );
    ws.write_text( "set_transient.csv", os.str() );
  }
  auto const end = endurance_run( d, o.cycles, wp );

  auto const t_set = transition_amplitude( set_points );
  auto const t_reset = transition_amplitude( reset_points );
  nlohmann::ordered_json summary;
  summary["set_transition_V"] = t_set ? nlohmann::ordered_json( *t_set ) : nlohmann::ordered_json();
  summary["reset_transition_V"] = t_reset ? nlohmann::ordered_json( *t_reset ) : nlohmann::ordered_json();
  summary["set_write_V"] = wp.set_pulse.peak();
  summary["reset_write_V"] = wp.reset_pulse.peak();
  summary["endurance"] = to_json( end );
  ws.write_json( "characterize.json", summary );
  ws.write_json( "endurance.json", to_json( end ) );
  ws.write_manifest( { { "set_max", o.set_max },
                       { "set_step", o.set_step },
                       { "reset_max", o.reset_max },
                       { "reset_step", o.reset_step },
                       { "cycles", o.cycles } } );

  std::cout << "set transition:   " << ( t_set ? fmt( "%.3g V", *t_set ) : std::string( "none in sweep" ) ) << '\n';
  std::cout << "reset transition: " << ( t_reset ? fmt( "%.3g V", *t_reset ) : std::string( "none in sweep" ) ) << '\n';
  std::cout << "write pulses:     set " << wp.set_pulse.peak() << " V, reset " << wp.reset_pulse.peak() << " V\n";
  std::cout << "endurance:        " << end.cycles << " cycles, switch_count " << end.switch_count << ", failed cycles "
            << end.failed_cycles << '\n';
  if ( end.warning )
  {
    std::cerr << "warning: switch_count " << end.switch_count << " reached the endurance limit of " << endurance_warning_cycles
              << " cycles\n";
  }
  return exit_ok;
}

/* ---- gate ---- */

struct gate_options
{
  std::string kind;
  std::string in1;
  std::string in2{ "-" };
  std::string out_old{ "0" };
  std::string mode{ "circuit" };
};

int run_gate( global_options const& g, gate_options const& o )
{
  workspace ws( g, "gate" );
  auto const kind = parse_kind( o.kind );
  bool const in1 = parse_bit( o.in1, "IN1" );
  std::optional<bool> in2;
  if ( has_second_input( kind ) )
  {
    if ( o.in2 == "-" )
    {
      throw usage_error( std::string( to_string( kind ) ) + " needs IN2" );
    }
    in2 = parse_bit( o.in2, "IN2" );
  }
  else if ( o.in2 != "-" )
  {
    throw usage_error( "IMPLY takes no IN2; pass '-' and set OUT with --out-old" );
  }
  bool const out_old = parse_bit( o.out_old, "--out-old" );
  auto const mode = parse_mode( o.mode );

  nlohmann::ordered_json report;
  report["gate"] = to_string( kind );
  report["operands"] = operand_combination{ in1, in2, out_old }.label();
  report["mode"] = o.mode;
  bool const expected = execute_gate_functional( kind, in1, in2, out_old );
  if ( mode == exec_mode::functional )
  {
    report["out"] = expected ? 1 : 0;
    std::cout << "out=" << ( expected ? 1 : 0 ) << '\n';
  }
  else
  {
    auto cp = ws.config.circuit;
    cp.allow_initialized_output = true;
    auto const r = execute_gate_circuit( kind, cells_for( { in1, in2, out_old }, ws.config.device ), cp );
    {
      std::ostringstream os;
      write_trace_csv( os, r.trace );
      ws.write_text( "gate_trace.csv", os.str() );
    }
    ws.write_json( "gate_events.json", events_json( r.trace ) );
    bool const stable = input_stability( r );
    report["out"] = std::string( 1, to_char( r.output ) );
    report["expected"] = expected ? 1 : 0;
    report["input_drift"] = r.max_input_drift;
    report["inputs_stable"] = stable;
    report["events"] = r.trace.events.size();
    report["max_kcl_residual_A"] = r.trace.max_kcl_residual;
    std::cout << "out=" << to_char( r.output ) << " (expected " << ( expected ? 1 : 0 ) << ")  input drift "
              << fmt( "%.3g", r.max_input_drift ) << "  inputs " << ( stable ? "stable" : "DISTURBED" ) << "  events "
              << r.trace.events.size() << '\n';
  }
  ws.write_json( "gate_report.json", report );
  ws.write_manifest( { { "kind", o.kind }, { "in1", o.in1 }, { "in2", o.in2 }, { "out_old", o.out_old }, { "mode", o.mode } } );
  return exit_ok;
}

/* ---- margins ---- */

struct margin_options
{
  std::string kind{ "all" };
  double lrs{ 10e3 };
  double hrs{ 100e3 };
  std::optional<double> lrs_lo;
  std::optional<double> hrs_hi;
  std::optional<double> r_fix;
};

int run_margins( global_options const& g, margin_options const& o )
{
  workspace ws( g, "margins" );
  resistance_bands const bands{ o.lrs_lo.value_or( o.lrs ), o.lrs, o.hrs, o.hrs_hi.value_or( o.hrs ) };
  auto gp = ws.config.circuit.gate;
  if ( o.r_fix )
  {
    gp.r_fix = *o.r_fix;
  }
  bool all_pass = true;
  auto out = nlohmann::ordered_json::array();
  std::printf( "%-6s %14s %18s %14s  %s\n", "gate", "switching[V]", "non-switching[V]", "input[V]", "result" );
  for ( auto k : parse_kinds( o.kind ) )
  {
    auto const m = worst_case_margins( make_gate_config( k, gp ), bands, ws.config.device );
    all_pass = all_pass && m.pass();
    out.push_back( to_json( m ) );
    std::printf( "%-6s %14.4f %18.4f %14.4f  %s\n", std::string( to_string( k ) ).c_str(), m.switching_margin,
                 m.non_switching_margin, m.input_margin, m.pass() ? "PASS" : "FAIL" );
  }
  ws.write_json( "margins.json", out );
  ws.write_manifest( { { "kind", o.kind },
                       { "lrs_lo", bands.lrs_lo },
                       { "lrs_hi", bands.lrs_hi },
                       { "hrs_lo", bands.hrs_lo },
                       { "hrs_hi", bands.hrs_hi },
                       { "r_fix", gp.r_fix } } );
  return all_pass ? exit_ok : exit_margin;
}

/* ---- montecarlo ---- */

struct mc_options
{
  std::string kind;
  long long iterations{ 0 };
  std::optional<double> sigma_vth;
  std::optional<double> sigma_r_lrs;
  std::optional<double> sigma_r_hrs;
  unsigned threads{ 0 };
};

int run_montecarlo( global_options const& g, mc_options const& o )
{
  if ( o.iterations < 1 )
  {
    throw usage_error( "iteration count must be at least 1" );
  }
  workspace ws( g, "montecarlo" );
  auto var = ws.config.variability;
  var.sigma_vth = o.sigma_vth.value_or( var.sigma_vth );
  var.sigma_r_lrs = o.sigma_r_lrs.value_or( var.sigma_r_lrs );
  var.sigma_r_hrs = o.sigma_r_hrs.value_or( var.sigma_r_hrs );
  for ( double s : { var.sigma_vth, var.sigma_r_lrs, var.sigma_r_hrs } )
  {
    if ( !( s >= 0.0 && s <= 0.5 ) )
    {
      throw usage_error( "sigmas must lie in [0, 0.5]" );
    }
  }

  monte_carlo_params p;
  p.circuit = ws.config.circuit;
  p.nominal = ws.config.device;
  p.variability = var;
  p.seed = g.seed;
  p.write_attempts = ws.config.write_attempts;
  p.threads = o.threads;

  for ( auto k : parse_kinds( o.kind ) )
  {
    auto const r = monte_carlo( k, static_cast<std::size_t>( o.iterations ), p );
    std::string const name( to_string( k ) );
    ws.write_json( "montecarlo_" + name + ".json", to_json( r ) );
    std::ostringstream os;
    write_scatter_csv( os, r );
    ws.write_text( "scatter_" + name + ".csv", os.str() );
    std::cout << name << ":";
    for ( auto const& c : r.combinations )
    {
      std::cout << "  " << c.operands.label() << " " << c.successes << "/" << c.trials;
    }
    std::cout << "  success " << fmt( "%.1f%%", 100.0 * r.success_rate() ) << '\n';
    for ( auto const& f : r.failures )
    {
      std::cout << "  failure: iteration " << f.iteration << " operands " << r.combinations[f.combination].operands.label()
                << " seed " << f.seed << ": " << f.reason << '\n';
    }
  }
  ws.write_manifest( { { "kind", o.kind },
                       { "iterations", o.iterations },
                       { "sigma_vth", var.sigma_vth },
                       { "sigma_r_lrs", var.sigma_r_lrs },
                       { "sigma_r_hrs", var.sigma_r_hrs } } );
  return exit_ok;
}

/* ---- compile / run ---- */

netlist load_netlist( std::string const& path )
{
  try
  {
    return parse_netlist( read_file( path ) );
  }
  catch ( parse_error const& )
  {
    std::cerr << path << ":\n";
    throw;
  }
}

struct compile_options
{
  std::string netlist_path;
  std::size_t row_width{ 16 };
};

int run_compile( global_options const& g, compile_options const& o )
{
  workspace ws( g, "compile" );
  auto const n = load_netlist( o.netlist_path );
  auto const cp = compile( n, o.row_width );
  ws.write_text( "program.txt", format_program( cp.listing ) );
  ws.write_json( "compile_stats.json", to_json( cp ) );
  ws.write_manifest( { { "netlist", o.netlist_path }, { "row_width", o.row_width } } );
  std::cout << "computation steps " << cp.stats.computation_steps << ", init ops " << cp.stats.init_ops << ", cells "
            << cp.stats.cells_used << " of " << o.row_width << '\n';
  return exit_ok;
}

struct run_options
{
  std::string path;
  std::string inputs;
  std::string mode{ "functional" };
  bool all_vectors{ false };
  std::string reference;
  std::size_t row_width{ 16 };
};

int run_run( global_options const& g, run_options const& o )
{
  workspace ws( g, "run" );
  auto const mode = parse_mode( o.mode );
  bool const is_netlist = fs::path( o.path ).extension() == ".net";
  std::optional<netlist> ref;
  compiled_program cp;
  if ( is_netlist )
  {
    ref = load_netlist( o.path );
    cp = compile( *ref, o.row_width );
  }
  else
  {
    cp.listing = parse_program( read_file( o.path ) );
    std::size_t width = 1;
    for ( auto const& s : cp.listing.steps )
    {
      for ( auto const& op : s.ops )
      {
        if ( auto const* gop = std::get_if<gate_op>( &op ) )
        {
          width = std::max( { width, gop->in1 + 1, gop->out + 1, gop->in2.value_or( 0 ) + 1 } );
        }
        else
        {
          for ( auto const& a : std::get<init_op>( op ).targets )
          {
            width = std::max( width, a.col + 1 );
          }
        }
      }
    }
    for ( auto const* io : { &cp.listing.inputs, &cp.listing.outputs } )
    {
      for ( auto const& [name, a] : *io )
      {
        width = std::max( width, a.col + 1 );
      }
    }
    cp.row_width = width;
    cp.stats.cells_used = width;
    for ( auto const& s : cp.listing.steps )
    {
      cp.stats.computation_steps += s.gate_count() > 0 ? 1u : 0u;
    }
    if ( !o.reference.empty() )
    {
      ref = load_netlist( o.reference );
    }
  }

  nlohmann::ordered_json args{ { "path", o.path },       { "inputs", o.inputs },       { "mode", o.mode },
                               { "all_vectors", o.all_vectors }, { "reference", o.reference }, { "row_width", o.row_width } };

  if ( o.all_vectors )
  {
    if ( !ref )
    {
      throw usage_error( "--all-vectors needs a .net file or --reference" );
    }
    if ( ref->inputs.size() != cp.listing.inputs.size() )
    {
      throw usage_error( "program declares " + std::to_string( cp.listing.inputs.size() ) + " inputs, netlist has " +
                         std::to_string( ref->inputs.size() ) );
    }
    verify_options vo;
    vo.mode = mode;
    vo.circuit = ws.config.circuit;
    vo.device = ws.config.device;
    vo.seed = g.seed;
    auto const r = verify_exhaustive( *ref, cp, vo );
    ws.write_json( "verify.json", to_json( r ) );
    ws.write_manifest( args );
    std::cout << ( r.vectors - r.mismatches.size() ) << "/" << r.vectors << " vectors pass, " << cp.stats.computation_steps
              << " computation steps\n";
    return r.pass() ? exit_ok : exit_verify;
  }

  /* single vector: bits in declared input order, either "101" or "a=1,b=0,c=1" */
  auto const& ins = cp.listing.inputs;
  std::vector<bool> bits;
  if ( o.inputs.find( '=' ) == std::string::npos )
  {
    for ( char c : o.inputs )
    {
      if ( c == ',' || c == ' ' )
      {
        continue;
      }
      bits.push_back( parse_bit( std::string( 1, c ), "input" ) );
    }
  }
  else
  {
    std::map<std::string, bool> named;
    std::stringstream ss( o.inputs );
    std::string item;
    while ( std::getline( ss, item, ',' ) )
    {
      auto const eq = item.find( '=' );
      if ( eq == std::string::npos )
      {
        throw usage_error( "inputs must be NAME=BIT pairs" );
      }
      named[item.substr( 0, eq )] = parse_bit( item.substr( eq + 1 ), "input" );
    }
    for ( auto const& [name, a] : ins )
    {
      if ( !named.count( name ) )
      {
        throw usage_error( "missing input " + name );
      }
      bits.push_back( named[name] );
    }
    if ( named.size() != ins.size() )
    {
      throw usage_error( "unknown input name given" );
    }
  }
  if ( bits.size() != ins.size() )
  {
    throw usage_error( "expected " + std::to_string( ins.size() ) + " input bits, got " + std::to_string( bits.size() ) );
  }

  crossbar x( 1, std::max<std::size_t>( cp.stats.cells_used, 1 ), ws.config.device );
  for ( std::size_t i = 0; i < ins.size(); ++i )
  {
    if ( mode == exec_mode::functional )
    {
      x.load( ins[i].second, bits[i] );
    }
    else
    {
      x.write( ins[i].second, bits[i], ws.config.write_attempts );
    }
  }
  auto const pr = run_program( x, cp.listing.steps, mode, ws.config.circuit );

  nlohmann::ordered_json report;
  report["computation_steps"] = pr.computation_steps;
  report["steps"] = pr.steps;
  report["init_targets"] = pr.init_targets;
  report["set_events"] = pr.set_events;
  report["max_switch_count"] = pr.max_switch_count;
  auto& outs = report["outputs"] = nlohmann::ordered_json::object();
  for ( auto const& [name, a] : cp.listing.outputs )
  {
    outs[name] = std::string( 1, to_char( x.level( a ) ) );
    std::cout << name << "=" << to_char( x.level( a ) ) << '\n';
  }
  bool ok = true;
  if ( ref )
  {
    auto const expected = evaluate( *ref, bits );
    for ( std::size_t i = 0; i < expected.size(); ++i )
    {
      ok = ok && x.level( cp.listing.outputs[i].second ) == ( expected[i] ? logic_level::one : logic_level::zero );
    }
    report["matches_reference"] = ok;
  }
  std::cout << pr.computation_steps << " computation steps, " << pr.set_events << " set events\n";
  ws.write_json( "run_report.json", report );
  {
    std::ostringstream os;
    write_logic_csv( os, x );
    ws.write_text( "final_state.csv", os.str() );
  }
  ws.write_json( "final_resistance.json", resistances_json( x ) );
  ws.write_manifest( args );
  return ok ? exit_ok : exit_verify;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Stateful-logic workbench for phase-change memory cells sharing a bottom electrode" };
  app.require_subcommand( 1 );
  global_options g;
  app.add_option( "--config", g.config_path, "JSON configuration file" );
  app.add_option( "--preset", g.preset, "experimental-setup or integrated" );
  app.add_option( "--seed", g.seed, "random seed" );
  app.add_option( "--out", g.out_dir, "output directory" );

  characterize_options co;
  auto* ch = app.add_subcommand( "characterize", "pulse sweeps, set transient and set/reset cycling of one cell" );
  ch->add_option( "--set-max", co.set_max, "largest set amplitude [V]" );
  ch->add_option( "--set-step", co.set_step, "set amplitude step [V]" );
  ch->add_option( "--reset-max", co.reset_max, "largest reset amplitude [V]" );
  ch->add_option( "--reset-step", co.reset_step, "reset amplitude step [V]" );
  ch->add_option( "--cycles", co.cycles, "set/reset cycles for the endurance count" );

  gate_options go;
  auto* ga = app.add_subcommand( "gate", "run one gate and write the shared-node trace" );
  ga->add_option( "kind", go.kind, "NOR, IMPLY, OR or NIMP" )->required();
  ga->add_option( "in1", go.in1, "IN1 bit" )->required();
  ga->add_option( "in2", go.in2, "IN2 bit, '-' for IMPLY" );
  ga->add_option( "--out-old", go.out_old, "initial OUT bit" );
  ga->add_option( "--mode", go.mode, "circuit or functional" );

  margin_options mo;
  auto* ma = app.add_subcommand( "margins", "worst-case voltage margins over resistance-band corners" );
  ma->add_option( "kind", mo.kind, "gate or 'all'" );
  ma->add_option( "--lrs", mo.lrs, "LRS band edge [ohm]" );
  ma->add_option( "--hrs", mo.hrs, "HRS band edge [ohm]" );
  ma->add_option( "--lrs-lo", mo.lrs_lo, "lower end of the LRS interval [ohm]" );
  ma->add_option( "--hrs-hi", mo.hrs_hi, "upper end of the HRS interval [ohm]" );
  ma->add_option( "--r-fix", mo.r_fix, "fixed BE resistor for NOR/IMPLY [ohm]" );

  mc_options mco;
  auto* mc = app.add_subcommand( "montecarlo", "gate robustness under device variability" );
  mc->add_option( "kind", mco.kind, "gate or 'all'" )->required();
  mc->add_option( "n", mco.iterations, "iterations" )->required();
  mc->add_option( "--sigma-vth", mco.sigma_vth, "relative sigma of v_th" );
  mc->add_option( "--sigma-r-lrs", mco.sigma_r_lrs, "lognormal sigma of r_lrs" );
  mc->add_option( "--sigma-r-hrs", mco.sigma_r_hrs, "lognormal sigma of r_hrs" );
  mc->add_option( "--threads", mco.threads, "worker threads, 0 = all cores" );

  compile_options cpo;
  auto* cp = app.add_subcommand( "compile", "compile a netlist to a crossbar program" );
  cp->add_option( "netlist", cpo.netlist_path, "netlist file" )->required();
  cp->add_option( "--row-width", cpo.row_width, "cells available in the row" );

  run_options ro;
  auto* ru = app.add_subcommand( "run", "run a program (or a .net netlist, compiled on the fly)" );
  ru->add_option( "path", ro.path, "program or .net file" )->required();
  ru->add_option( "--inputs", ro.inputs, "input bits in declared order, or NAME=BIT,..." );
  ru->add_option( "--mode", ro.mode, "functional or circuit" );
  ru->add_flag( "--all-vectors", ro.all_vectors, "check every input vector against the reference netlist" );
  ru->add_option( "--reference", ro.reference, "reference netlist for a program file" );
  ru->add_option( "--row-width", ro.row_width, "cells available when compiling a netlist" );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::ParseError const& e )
  {
    int const rc = app.exit( e );
    return rc == 0 ? exit_ok : exit_usage;
  }

  try
  {
    if ( *ch )
    {
      return run_characterize( g, co );
    }
    if ( *ga )
    {
      return run_gate( g, go );
    }
    if ( *ma )
    {
      return run_margins( g, mo );
    }
    if ( *mc )
    {
      return run_montecarlo( g, mco );
    }
    if ( *cp )
    {
      return run_compile( g, cpo );
    }
    if ( *ru )
    {
      return run_run( g, ro );
    }
  }
  catch ( usage_error const& e )
  {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_usage;
  }
  catch ( error const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    if ( e.code() == error_code::config_error )
    {
      return exit_config;
    }
    if ( e.code() == error_code::verify_failed )
    {
      return exit_verify;
    }
    return exit_runtime;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }
  return exit_usage;
}
