#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "coolgraph/coolgraph.hpp"
#include "coolgraph/detail/input.hpp"

namespace coolgraph::cli {
namespace {

namespace fs = std::filesystem;

struct DataArgs {
  std::string states;
  std::vector<std::string> trans;
  std::string schema;
  std::string graph;  // prebuilt snapshot instead of states/trans
};

struct Config {
  DataArgs data;
  SearchParams params;
  std::string format = "table";
  std::string out;
  bool double_s1 = false;
  bool full_precision = false;
  double laser_tolerance_ghz = kDefaultLaserToleranceGhz;
  unsigned threads = 0;
  // diagram / simulate
  std::vector<StateId> s1;
  std::optional<StateId> s0;
  std::size_t g = 0;
  std::size_t trials = 1000000;
  std::uint64_t seed = 1;
  std::size_t max_scatters = 0;
};

void add_data_options(CLI::App& cmd, DataArgs& d) {
  cmd.add_option("--states", d.states, "ExoMol-style .states file (plain or .bz2)");
  cmd.add_option("--trans", d.trans, "ExoMol-style .trans file (plain or .bz2); repeatable")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->allow_extra_args(false);
  cmd.add_option("--schema", d.schema,
                 "states column schema file; default: header row of the states file, else id,energy,c3,...");
}

void add_graph_options(CLI::App& cmd, SearchParams& p) {
  cmd.add_option("--br-floor", p.br_floor, "drop decay channels with BR below this")->capture_default_str();
  cmd.add_option("--lifetime-sentinel-s", p.lifetime_sentinel_s, "lifetime of states without decays (s)")
      ->capture_default_str();
}

void add_search_options(CLI::App& cmd, Config& c) {
  auto& p = c.params;
  cmd.add_option("--graph", c.data.graph, "prebuilt graph snapshot (from export-graph) instead of --states/--trans");
  cmd.add_option("--gmax", p.g_max, "largest number of driven transitions")->required();
  cmd.add_option("--lambda-min-nm", p.lambda_min_nm, "lower wavelength bound (nm, exclusive)")->required();
  cmd.add_option("--lambda-max-nm", p.lambda_max_nm, "upper wavelength bound (nm, exclusive)")->required();
  cmd.add_option("--mass-u", p.mass_u, "molecular mass (u)")->required();
  cmd.add_option("--t0-k", p.t0_k, "maximal initial gas temperature (K)")->capture_default_str();
  cmd.add_option("--intensity-mw-cm2", p.intensity_mw_cm2, "laser intensity per transition (mW/cm^2)")
      ->capture_default_str();
  cmd.add_option("--min-tau-s", p.min_starting_lifetime_s, "minimal lifetime of starting and driven lower states (s)")
      ->capture_default_str();
  cmd.add_flag("--relaxed-4k", p.relaxed_4k, "evaluate and report schemes at T_init = 4 K");
  cmd.add_flag("!--no-s2-lifetime-floor", p.s2_lifetime_floor,
               "keep driven channels into lower states living <= --min-tau-s");
  cmd.add_option("--tau-ratio-max", p.double_lifetime_ratio_max,
                 "largest lifetime ratio of the two excited states of a double scheme")
      ->capture_default_str();
  cmd.add_option("--threads", c.threads, "worker threads (0 = hardware concurrency)")->capture_default_str();
  add_graph_options(cmd, p);
}

std::string first_data_line(const fs::path& path) {
  detail::DecodedInput input(path);
  std::string line;
  while (std::getline(input.stream(), line)) {
    const auto t = detail::trim(line);
    if (!t.empty() && t.front() != '#') return std::string(t);
  }
  return {};
}


void check_data_args(const DataArgs& d, bool allow_graph) {
  if (allow_graph && !d.graph.empty()) {
    if (!d.states.empty() || !d.trans.empty()) throw UsageError("--graph cannot be combined with --states/--trans");
    return;
  }
  if (d.states.empty()) throw UsageError(allow_graph ? "--states (or --graph) is required" : "--states is required");
  if (d.trans.empty()) throw UsageError("--trans is required at least once");
}

/// Flag-level validation, run before touching any input file.
void check_search_flags(const SearchParams& p) {
  if (p.g_max < 1) throw UsageError("--gmax must be at least 1");
  if (!(p.lambda_min_nm < p.lambda_max_nm))
    throw UsageError(fmt::format("--lambda-min-nm ({}) must be below --lambda-max-nm ({})", p.lambda_min_nm,
                                 p.lambda_max_nm));
  if (p.lambda_min_nm < 0.0) throw UsageError("--lambda-min-nm must be non-negative");
  if (!(p.t0_k > 0.0)) throw UsageError("--t0-k must be positive");
  if (!(p.mass_u > 0.0)) throw UsageError("--mass-u must be positive");
  if (!(p.intensity_mw_cm2 > 0.0)) throw UsageError("--intensity-mw-cm2 must be positive");
  if (p.br_floor < 0.0) throw UsageError("--br-floor must be non-negative");
  if (p.min_starting_lifetime_s < 0.0) throw UsageError("--min-tau-s must be non-negative");
  if (!(p.lifetime_sentinel_s > 0.0)) throw UsageError("--lifetime-sentinel-s must be positive");
  if (!(p.double_lifetime_ratio_max >= 1.0)) throw UsageError("--tau-ratio-max must be at least 1");
  p.validate();
}

LevelGraph load_graph(const DataArgs& d, const SearchParams& p) {
  if (!d.graph.empty()) return read_snapshot(fs::path(d.graph));
  const auto schema = resolve_states_schema(d.states, d.schema);
  const std::vector<fs::path> trans(d.trans.begin(), d.trans.end());
  const auto dataset = load_dataset(d.states, trans, schema);
  GraphOptions opts;
  opts.br_floor = p.br_floor;
  opts.lifetime_sentinel_s = p.lifetime_sentinel_s;
  return build_graph(dataset, opts);
}

std::vector<CoolingScheme> search_all(const LevelGraph& graph, const Config& c) {
  return c.double_s1 ? enumerate_double_schemes(graph, c.params, c.threads) : sweep(graph, c.params, c.threads);
}

void emit(const Config& c, const std::string& text, std::ostream& out) {
  if (c.out.empty() || c.out == "-") out << text;
  else write_atomic(c.out, text);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_search(const Config& c, std::ostream& out, std::ostream& err) {
  check_search_flags(c.params);
  check_data_args(c.data, true);
  const auto t0 = std::chrono::steady_clock::now();
  const auto graph = load_graph(c.data, c.params);
  const auto schemes = search_all(graph, c);
  ReportOptions ro;
  ro.full_precision = c.full_precision;
  ro.relaxed_4k = c.params.relaxed_4k;
  ro.laser_tolerance_ghz = c.laser_tolerance_ghz;
  std::string text;
  if (c.format == "json") text = to_json(schemes, ro);
  else if (c.format == "csv") text = to_csv(make_rows(schemes, ro), ro);
  else text = to_table(make_rows(schemes, ro), ro);
  emit(c, text, out);
  err << fmt::format("search: {} states, {} edges, {} {}scheme(s) in {:.2f} s\n", graph.state_count(),
                     graph.edge_count(), schemes.size(), c.double_s1 ? "double " : "", seconds_since(t0));
  return kExitOk;
}

int cmd_export_graph(const Config& c, std::ostream&, std::ostream& err) {
  check_data_args(c.data, false);
  if (c.params.br_floor < 0.0) throw UsageError("--br-floor must be non-negative");
  if (!(c.params.lifetime_sentinel_s > 0.0)) throw UsageError("--lifetime-sentinel-s must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  const auto graph = load_graph(c.data, c.params);
  std::ostringstream buffer;
  write_snapshot(buffer, graph);
  write_atomic(c.out, buffer.str());
  err << fmt::format("export-graph: {} states, {} edges ({} pruned) in {:.2f} s\n", graph.state_count(),
                     graph.edge_count(), graph.stats().pruned, seconds_since(t0));
  return kExitOk;
}

/// The emitted scheme matching --s1 (one id, or two for a double scheme),
/// --g and optionally --s0.
CoolingScheme select_scheme(const LevelGraph& graph, const Config& c) {
  if (c.s1.empty() || c.s1.size() > 2) throw UsageError("--s1 takes one id, or two for a double scheme");
  if (c.g < 1) throw UsageError("--g must be at least 1");
  auto s1 = c.s1;
  std::sort(s1.begin(), s1.end());
  Config local = c;
  local.double_s1 = s1.size() == 2;
  local.params.g_max = std::max(c.params.g_max, c.g);
  std::vector<CoolingScheme> found;
  if (local.double_s1) found = enumerate_double_schemes(graph, local.params, c.threads);
  else found = enumerate_single_schemes(graph, local.params, c.g, c.threads);
  for (const auto& s : found) {
    if (s.s1_ids != s1 || (c.s0 && s.s0_ids.front() != *c.s0)) continue;
    if (local.double_s1 && s.g != c.g) continue;
    return s;
  }
  throw LookupError(fmt::format("no emitted scheme for S1 {} with g = {}{}", fmt::join(s1, "+"), c.g,
                                c.s0 ? fmt::format(" and S0 {}", *c.s0) : std::string()));
}

int cmd_diagram(const Config& c, std::ostream& out, std::ostream&) {
  check_search_flags(c.params);
  check_data_args(c.data, true);
  const auto graph = load_graph(c.data, c.params);
  emit(c, export_diagram(select_scheme(graph, c)), out);
  return kExitOk;
}

int cmd_simulate(const Config& c, std::ostream& out, std::ostream& err) {
  check_search_flags(c.params);
  check_data_args(c.data, true);
  if (c.s1.size() != 1) throw UsageError("simulate supports one --s1 id");
  if (c.trials < 1) throw UsageError("--trials must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  const auto graph = load_graph(c.data, c.params);
  CyclingRun run;
  run.scheme = select_scheme(graph, c);
  run.trials = c.trials;
  run.seed = c.seed;
  const auto& f = run.scheme.figures;
  run.max_scatters = c.max_scatters ? c.max_scatters
                                    : (std::isinf(f.n10) ? std::size_t{1000}
                                                         : static_cast<std::size_t>(std::ceil(f.n10)));
  const auto curve = simulate_survival(graph, run, c.threads);
  const auto momentum = estimate_mean_photon_momentum(graph, run, c.threads);
  std::string text = "scatters,survival\n";
  const std::size_t stride = std::max<std::size_t>(1, run.max_scatters / 100);
  for (std::size_t n = 0; n <= run.max_scatters; n += stride) text += fmt::format("{},{}\n", n, curve.at(n));
  if (run.max_scatters % stride) text += fmt::format("{},{}\n", run.max_scatters, curve.at(run.max_scatters));
  emit(c, text, out);
  err << fmt::format(
      "simulate: closure {:.8f}, n10 {:.1f}, survival at {} scatters {:.5f}, loss per scatter {:.3e}, "
      "mean photon momentum {:.6e} +- {:.1e} kg m/s, {} trials in {:.2f} s\n",
      f.closure_p, f.n10, run.max_scatters, curve.at(run.max_scatters), curve.lost_per_scatter, momentum.mean,
      momentum.standard_error, run.trials, seconds_since(t0));
  return kExitOk;
}

}  // namespace

StatesSchema resolve_states_schema(const std::string& states_path, const std::string& schema_path) {
  if (!schema_path.empty()) return StatesSchema::load(schema_path);
  const auto line = first_data_line(states_path);
  std::vector<std::string_view> fields;
  detail::split_fields(line, fields);
  if (fields.empty()) throw DataError("states file " + states_path + " has no rows");
  if (!detail::to_int(fields.front())) return StatesSchema::from_header(line);
  std::vector<std::string> names{"id", "energy"};
  for (std::size_t i = 2; i < fields.size(); ++i) names.push_back(fmt::format("c{}", i + 1));
  return StatesSchema(std::move(names));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Search molecular line lists for optical cycling / laser cooling schemes", "coolgraph"};
  app.set_config("--config", "", "TOML/INI file with option defaults (command-line flags take precedence)");
  app.require_subcommand(1);
  // A repeated flag keeps its last value (config files and wrappers may append).
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all", "expand all help");

  auto* search = app.add_subcommand("search", "find and rank cooling schemes");
  add_data_options(*search, c.data);
  add_search_options(*search, c);
  search->add_flag("--double-s1", c.double_s1, "search schemes built on two excited states");
  search->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  search->add_option("--out", c.out, "output file (default: stdout); written atomically");
  search->add_flag("--full-precision", c.full_precision, "print raw doubles instead of table rounding");
  search->add_option("--laser-tolerance-ghz", c.laser_tolerance_ghz,
                     "transitions closer than this in frequency share one laser")
      ->capture_default_str();

  auto* export_graph = app.add_subcommand("export-graph", "build the decay graph and write a binary snapshot");
  add_data_options(*export_graph, c.data);
  add_graph_options(*export_graph, c.params);
  export_graph->add_option("--out", c.out, "snapshot file")->required();

  auto* diagram = app.add_subcommand("diagram", "DOT diagram of one emitted scheme");
  add_data_options(*diagram, c.data);
  add_search_options(*diagram, c);
  diagram->add_option("--s1", c.s1, "excited state id (two ids for a double scheme)")->required()
      ->expected(1, 2)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  diagram->add_option("--g", c.g, "number of lasers G the scheme was found with")->required();
  diagram->add_option("--s0", c.s0, "starting state id (default: first emitted)");
  diagram->add_option("--out", c.out, "output file (default: stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo photon cycling of one emitted scheme");
  add_data_options(*simulate, c.data);
  add_search_options(*simulate, c);
  simulate->add_option("--s1", c.s1, "excited state id")->required();
  simulate->add_option("--g", c.g, "number of lasers G")->required();
  simulate->add_option("--s0", c.s0, "starting state id (default: first emitted)");
  simulate->add_option("--trials", c.trials, "simulated molecules")->capture_default_str();
  simulate->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--max-scatters", c.max_scatters, "scatters per molecule (default: ceil(n10))");
  simulate->add_option("--out", c.out, "survival curve CSV (default: stdout)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (search->parsed()) return cmd_search(c, out, err);
    if (export_graph->parsed()) return cmd_export_graph(c, out, err);
    if (diagram->parsed()) return cmd_diagram(c, out, err);
    if (simulate->parsed()) return cmd_simulate(c, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const LookupError& e) {
    err << "lookup error: " << e.what() << "\n";
    return kExitData;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace coolgraph::cli
