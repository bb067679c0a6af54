#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "navflow/navflow.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace navflow;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct SimFlags {
  std::string flow = "new";
  double k = 20.0;
  double eta = 0.01;
  double eps = 1e-4;
  std::size_t max_steps = 50000;
  std::optional<double> sensor_range;
  std::uint64_t seed = 0;
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--flow", f.flow, "nav, old, new, switched or phi")
      ->check(CLI::IsMember({"nav", "old", "new", "switched", "phi"}))
      ->capture_default_str();
  cmd->add_option("--k", f.k, "navigation parameter k")->capture_default_str();
  cmd->add_option("--eta", f.eta, "step length")->capture_default_str();
  cmd->add_option("--eps", f.eps, "normalization offset")->capture_default_str();
  cmd->add_option("--max-steps", f.max_steps, "step budget")->capture_default_str();
  cmd->add_option("--sensor-range", f.sensor_range, "awareness radius c (switched flow)");
  cmd->add_option("--seed", f.seed, "random seed (NAVFLOW_SEED overrides)")->capture_default_str();
}

std::uint64_t effective_seed(std::uint64_t flag) {
  if (const char* env = std::getenv("NAVFLOW_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string("NAVFLOW_SEED is not an unsigned integer: ") + env);
    }
  }
  return flag;
}

SimConfig to_config(const SimFlags& f) {
  SimConfig c;
  c.flow = parse_dynamics(f.flow);
  c.k = f.k;
  c.eta = f.eta;
  c.epsilon_norm = f.eps;
  c.max_steps = f.max_steps;
  c.sensor_range_c = f.sensor_range;
  c.seed = effective_seed(f.seed);
  c.validate();
  return c;
}

Vector parse_point(const std::string& text, int n) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ValidationError("bad coordinate '" + cell + "' in '" + text + "'");
    }
  }
  if (static_cast<int>(vals.size()) != n) {
    throw DimensionError("point '" + text + "' has " + std::to_string(vals.size()) + " coordinates, world has " +
                         std::to_string(n));
  }
  return Eigen::Map<Vector>(vals.data(), n);
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(cell));
      } else {
        out.push_back(static_cast<T>(std::stoull(cell)));
      }
    } catch (const std::exception&) {
      throw ValidationError("bad list entry '" + cell + "'");
    }
  }
  return out;
}

// "2..7" or "2,3,4"
std::vector<std::size_t> parse_range(const std::string& text) {
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = parse_list<std::size_t>(text.substr(0, dots));
    const auto hi = parse_list<std::size_t>(text.substr(dots + 2));
    if (lo.size() != 1 || hi.size() != 1 || hi[0] < lo[0]) throw ValidationError("bad range '" + text + "'");
    std::vector<std::size_t> out;
    for (std::size_t v = lo[0]; v <= hi[0]; ++v) out.push_back(v);
    return out;
  }
  return parse_list<std::size_t>(text);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string hyperplane_json_text(const Hyperplane& h) {
  json j;
  j["normal"] = std::vector<double>(h.normal.data(), h.normal.data() + h.normal.size());
  j["offset"] = h.offset;
  return j.dump();
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string world;
  SimFlags sim;
  std::string start;
  std::string out = "trajectory";
  bool svg = false;
  bool quiver = false;
  bool second_order = false;
  double damping = 1.0;
};

int cmd_simulate(const SimulateArgs& a) {
  const World w = load_world(a.world);
  if (const auto v = validate_world(w); !v.empty()) throw ValidationError(a.world + ": " + v.front().message);
  SimConfig cfg = to_config(a.sim);
  cfg.record_diagnostics = true;

  Vector x0;
  if (!a.start.empty()) {
    x0 = parse_point(a.start, w.dimension());
  } else {
    GenConfig g;
    g.r0 = w.workspace().r0();
    g.dimension = w.dimension();
    g.seed = cfg.seed;
    x0 = gen_start(w, g);
  }
  if (!in_free_space(w, x0)) throw ValidationError("start point is not in free space");

  Trajectory traj = a.second_order ? run_second_order(w, cfg, x0, Vector::Zero(w.dimension()), a.damping)
                                   : run(w, cfg, x0);
  if (a.second_order) {
    // Second-order runs carry velocities instead of first-order diagnostics.
    traj.diagnostics.clear();
  }

  const fs::path prefix(a.out);
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  write_file(prefix.string() + ".csv", csv.str());
  write_file(prefix.string() + ".json", status_json(traj, {a.world, cfg, x0}));
  if (cfg.flow == Dynamics::kSwitchedNavFn) {
    std::ostringstream disc;
    write_discovery_csv(disc, traj);
    write_file(prefix.string() + "_discoveries.csv", disc.str());
  }
  if (a.svg) {
    if (w.dimension() != 2) {
      std::cerr << "note: SVG output is planar only; wrote CSV\n";
    } else {
      PlotOptions opt;
      if (a.quiver && cfg.flow != Dynamics::kSwitchedNavFn) opt.quiver = cfg;
      write_file(prefix.string() + ".svg", render_svg(w, {{traj.states, traj.status != Status::kSuccess}}, opt));
    }
  }
  std::cout << to_string(traj.status) << " after " << traj.steps << " steps (min beta " << traj.min_beta_seen
            << ")\n";
  return 0;
}

// --- benchmark --------------------------------------------------------------

struct BenchmarkArgs {
  std::string ks = "20,40,60";
  std::string ms = "2..7";
  std::size_t trials = 100;
  std::vector<std::string> flows{"new"};
  std::string family = "planar";
  int dimension = 2;
  double r0 = 20.0;
  std::uint64_t seed = 2019;
  std::size_t jobs = 0;
  double eta = 0.01;
  double eps = 1e-4;
  std::size_t max_steps = 50000;
  std::optional<double> sensor_range;
  std::string out;
  std::string json_out;
  bool quiet = false;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  SweepConfig s;
  s.ks = parse_list<double>(a.ks);
  s.ms = parse_range(a.ms);
  s.trials = a.trials;
  s.flows.clear();
  for (const auto& f : a.flows) s.flows.push_back(parse_dynamics(f));
  s.family = parse_world_family(a.family);
  s.dimension = a.dimension;
  s.r0 = a.r0;
  s.master_seed = effective_seed(a.seed);
  s.jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
  s.base.eta = a.eta;
  s.base.epsilon_norm = a.eps;
  s.base.max_steps = a.max_steps;
  s.base.sensor_range_c = a.sensor_range;

  SweepProgress progress;
  if (!a.quiet) {
    progress = [](std::size_t done, std::size_t total) {
      if (done == total || done % 20 == 0) std::cerr << "\r" << done << "/" << total << " trials" << std::flush;
      if (done == total) std::cerr << "\n";
    };
  }
  const BenchmarkReport report = run_sweep(s, progress);
  std::ostringstream csv;
  write_report_csv(csv, report);
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(a.out, csv.str());
  }
  if (!a.json_out.empty()) write_file(a.json_out, report_json(report));
  if (report.total_safety_violations() != 0) {
    std::cerr << "error: " << report.total_safety_violations() << " accepted states left the free space\n";
    return kExitRuntime;
  }
  return 0;
}

// --- graph / check ----------------------------------------------------------

int cmd_graph(const std::string& path, bool as_json) {
  const World w = load_world(path);
  const ConfigGraph g = build_config_graph(w);
  if (as_json) {
    json j;
    j["nodes"] = g.nodes;
    j["is_dag"] = g.is_dag;
    j["cycles"] = g.cycles;
    json edges = json::array();
    for (const auto& e : g.edges) {
      edges.push_back({{"from", e.from},
                       {"to", e.to},
                       {"witness", json::parse(hyperplane_json_text(e.witness))}});
    }
    j["edges"] = edges;
    json pairs = json::array();
    for (const auto& p : g.pairs) pairs.push_back({{"i", p.i}, {"j", p.j}, {"condition1", p.condition1}, {"condition2", p.condition2}});
    j["pairs"] = pairs;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "nodes: " << g.nodes.size() << "\n";
  std::cout << "edges: " << g.edges.size() << "\n";
  for (const auto& e : g.edges) {
    std::cout << "  " << e.from << " -> " << e.to << "  witness " << hyperplane_json_text(e.witness) << "\n";
  }
  std::cout << "dag: " << (g.is_dag ? "yes" : "no") << "\n";
  for (const auto& c : g.cycles) {
    std::cout << "  cycle:";
    for (std::size_t v : c) std::cout << ' ' << v;
    std::cout << "\n";
  }
  return 0;
}

struct CheckArgs {
  std::string world;
  bool json = false;
  std::optional<double> k_max;
  std::size_t starts = 8;
  std::uint64_t seed = 0;
};

std::optional<KScanReport> scan_k(const World& w, const CheckArgs& a) {
  if (!a.k_max) return std::nullopt;
  if (a.starts == 0) throw ValidationError("--starts must be positive");
  GenConfig g;
  g.r0 = w.workspace().r0();
  g.dimension = w.dimension();
  std::vector<Vector> starts;
  for (std::size_t i = 0; i < a.starts; ++i) {
    g.seed = effective_seed(a.seed) + i;
    starts.push_back(gen_start(w, g));
  }
  return k_scan(w, SimConfig{}, starts, 10.0, *a.k_max);
}

constexpr const char* kSwitchedNote =
    "the switched-flow guarantee is assessed with this condition as a stand-in";

int cmd_check(const CheckArgs& a) {
  const std::string& path = a.world;
  const bool as_json = a.json;
  const World w = load_world(path);
  const auto violations = validate_world(w);
  const ConditionReport r = check_condition(w);
  if (as_json) {
    json j;
    j["valid"] = violations.empty();
    json v = json::array();
    for (const auto& x : violations) v.push_back({{"assumption", to_string(x.kind)}, {"indices", x.indices}, {"message", x.message}});
    j["violations"] = v;
    json rows = json::array();
    for (std::size_t i = 0; i < r.obstacles.size(); ++i) {
      const auto& e = r.obstacles[i];
      rows.push_back({{"obstacle", i}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"satisfied", e.satisfied}});
    }
    j["condition"] = rows;
    j["overall"] = r.overall;
    j["switched_flow_note"] = kSwitchedNote;
    if (violations.empty()) {
      if (const auto scan = scan_k(w, a)) {
        json ks = json::array();
        for (std::size_t i = 0; i < scan->k_values.size(); ++i) {
          ks.push_back({{"k", scan->k_values[i]}, {"successes", scan->successes[i]},
                        {"local_violations", scan->local_violations[i]}});
        }
        j["k_scan"] = {{"runs_per_k", scan->runs_per_k}, {"results", ks},
                       {"smallest_passing_k", scan->smallest_passing ? json(*scan->smallest_passing) : json(nullptr)}};
      }
    }
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& x : violations) std::cout << to_string(x.kind) << ": " << x.message << "\n";
    std::printf("%-9s %14s %14s  %s\n", "obstacle", "lhs", "rhs", "verdict");
    for (std::size_t i = 0; i < r.obstacles.size(); ++i) {
      const auto& e = r.obstacles[i];
      std::printf("%-9zu %14.6g %14.6g  %s\n", i, e.lhs, e.rhs, e.satisfied ? "satisfied" : "violated");
    }
    std::cout << "overall: " << (r.overall ? "satisfied" : "violated") << "\n";
    std::cout << "note: " << kSwitchedNote << "\n";
    if (violations.empty()) {
      if (const auto scan = scan_k(w, a)) {
        std::printf("%-9s %10s %17s\n", "k", "successes", "local violations");
        for (std::size_t i = 0; i < scan->k_values.size(); ++i) {
          std::printf("%-9g %6zu/%-3zu %17zu\n", scan->k_values[i], scan->successes[i], scan->runs_per_k,
                      scan->local_violations[i]);
        }
        if (scan->smallest_passing) {
          std::printf("smallest passing k: %g (empirical)\n", *scan->smallest_passing);
        } else {
          std::cout << "smallest passing k: none up to " << *a.k_max << "\n";
        }
      }
    }
  }
  return violations.empty() ? 0 : kExitValidation;
}

// --- gen ---------------------------------------------------------------------

struct GenArgs {
  std::size_t m = 5;
  std::uint64_t seed = 0;
  double r0 = 20.0;
  int dimension = 2;
  std::string family = "planar";
  double ratio_min = 1.0;
  double ratio_max = 10.0;
  std::string radii;
  bool violate = false;
  std::size_t count = 0;
  std::string out;
};

World generate(const GenArgs& a, std::uint64_t seed) {
  GenConfig g;
  g.r0 = a.r0;
  g.m = a.m;
  g.dimension = a.dimension;
  g.seed = seed;
  if (a.family == "sphere") return gen_sphere_world(g);
  if (a.dimension == 2 && a.radii.empty() && !a.violate && a.family == "planar") return gen_world_2d(g);
  NdOptions o;
  o.ratio_min = a.ratio_min;
  o.ratio_max = a.ratio_max;
  o.radius_choices = parse_list<double>(a.radii);
  o.require_condition_violation = a.violate;
  return gen_world_nd(g, o);
}

int cmd_gen(const GenArgs& a) {
  if (a.family != "planar" && a.family != "sphere" && a.family != "nd") {
    throw ValidationError("unknown family '" + a.family + "'");
  }
  const std::uint64_t seed = effective_seed(a.seed);
  if (a.count == 0) {
    const std::string text = serialize_world(generate(a, seed));
    if (a.out.empty()) {
      std::cout << text;
    } else {
      write_file(a.out, text);
    }
    return 0;
  }
  if (a.out.empty()) throw ValidationError("batch generation needs --out <directory>");
  const fs::path dir(a.out);
  fs::create_directories(dir);
  json manifest;
  manifest["rng"] = Rng::kName;
  manifest["master_seed"] = seed;
  manifest["split"] = "splitmix64(master + golden * (index + 1))";
  json worlds = json::array();
  for (std::size_t i = 0; i < a.count; ++i) {
    const std::uint64_t s = split_seed(seed, i);
    char name[32];
    std::snprintf(name, sizeof name, "world_%04zu.json", i);
    write_file(dir / name, serialize_world(generate(a, s)));
    worlds.push_back({{"file", name}, {"seed", s}});
  }
  manifest["worlds"] = worlds;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

// --- plot --------------------------------------------------------------------

struct PlotArgs {
  std::string world;
  std::vector<std::string> trajectories;
  std::vector<std::string> failed;
  std::string out = "plot.svg";
  std::string quiver_flow;
  double k = 20.0;
  int grid = 24;
};

int cmd_plot(const PlotArgs& a) {
  const World w = load_world(a.world);
  std::vector<PlotPath> paths;
  auto add = [&](const std::string& file, bool failed) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open trajectory '" + file + "'");
    paths.push_back({read_trajectory_csv(in).states, failed});
  };
  for (const auto& t : a.trajectories) add(t, false);
  for (const auto& t : a.failed) add(t, true);
  PlotOptions opt;
  opt.quiver_grid = a.grid;
  if (!a.quiver_flow.empty()) {
    SimConfig c;
    c.flow = parse_dynamics(a.quiver_flow);
    c.k = a.k;
    opt.quiver = c;
  }
  write_file(a.out, render_svg(w, paths, opt));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"navflow: navigation-function flows among ellipsoidal obstacles"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  simulate->add_option("world", sim.world, "world JSON file")->required();
  add_sim_flags(simulate, sim.sim);
  simulate->add_option("--start", sim.start, "start point x,y[,...]; sampled when omitted");
  simulate->add_option("--out", sim.out, "output prefix")->capture_default_str();
  simulate->add_flag("--svg", sim.svg, "also write an SVG plot (planar worlds)");
  simulate->add_flag("--quiver", sim.quiver, "draw the vector field in the SVG");
  simulate->add_flag("--second-order", sim.second_order, "double integrator with the torque controller");
  simulate->add_option("--damping", sim.damping, "damping gain for --second-order")->capture_default_str();

  BenchmarkArgs bench;
  auto* benchmark = app.add_subcommand("benchmark", "Monte Carlo success-rate sweep");
  benchmark->add_option("--k", bench.ks, "comma-separated k values")->capture_default_str();
  benchmark->add_option("--m", bench.ms, "obstacle counts, list or lo..hi")->capture_default_str();
  benchmark->add_option("--trials", bench.trials, "trials per cell")->capture_default_str();
  benchmark->add_option("--flow", bench.flows, "flows to run (repeatable)")->capture_default_str();
  benchmark->add_option("--family", bench.family, "planar or sphere")->capture_default_str();
  benchmark->add_option("--dim", bench.dimension, "dimension (sphere family)")->capture_default_str();
  benchmark->add_option("--r0", bench.r0, "workspace radius")->capture_default_str();
  benchmark->add_option("--seed", bench.seed, "master seed (NAVFLOW_SEED overrides)")->capture_default_str();
  benchmark->add_option("--jobs", bench.jobs, "worker threads, 0 = all cores")->capture_default_str();
  benchmark->add_option("--eta", bench.eta, "step length")->capture_default_str();
  benchmark->add_option("--eps", bench.eps, "normalization offset")->capture_default_str();
  benchmark->add_option("--max-steps", bench.max_steps, "step budget")->capture_default_str();
  benchmark->add_option("--sensor-range", bench.sensor_range, "awareness radius c (switched flow)");
  benchmark->add_option("--out", bench.out, "CSV path (stdout when omitted)");
  benchmark->add_option("--json", bench.json_out, "JSON report path");
  benchmark->add_flag("--quiet", bench.quiet, "no progress output");

  std::string graph_world;
  bool graph_json = false;
  auto* graph = app.add_subcommand("graph", "configuration graph of a world");
  graph->add_option("world", graph_world, "world JSON file")->required();
  graph->add_flag("--json", graph_json, "machine-readable output");

  CheckArgs chk;
  auto* check = app.add_subcommand("check", "validate a world and report the eccentricity condition");
  check->add_option("world", chk.world, "world JSON file")->required();
  check->add_flag("--json", chk.json, "machine-readable output");
  check->add_option("--k-scan", chk.k_max, "largest k for the empirical scan k = 10, 20, ...");
  check->add_option("--starts", chk.starts, "sampled starts per k in the scan")->capture_default_str();
  check->add_option("--seed", chk.seed, "seed for the scan starts (NAVFLOW_SEED overrides)")->capture_default_str();

  GenArgs gen;
  auto* gencmd = app.add_subcommand("gen", "generate random worlds");
  gencmd->alias("gen-world");
  gencmd->add_option("--m", gen.m, "obstacle count")->capture_default_str();
  gencmd->add_option("--seed", gen.seed, "seed (NAVFLOW_SEED overrides)")->capture_default_str();
  gencmd->add_option("--r0", gen.r0, "workspace radius")->capture_default_str();
  gencmd->add_option("--dim", gen.dimension, "dimension")->capture_default_str();
  gencmd->add_option("--family", gen.family, "planar, nd or sphere")->capture_default_str();
  gencmd->add_option("--ratio-min", gen.ratio_min, "smallest eccentricity ratio (nd)")->capture_default_str();
  gencmd->add_option("--ratio-max", gen.ratio_max, "largest eccentricity ratio (nd)")->capture_default_str();
  gencmd->add_option("--radii", gen.radii, "comma-separated radius choices (nd)");
  gencmd->add_flag("--violate", gen.violate, "require an obstacle violating the condition (nd)");
  gencmd->add_option("--count", gen.count, "batch size; writes a directory with a manifest");
  gencmd->add_option("--out", gen.out, "output file (or directory with --count)");

  PlotArgs plot;
  auto* plotcmd = app.add_subcommand("plot", "SVG of a world and trajectory CSVs");
  plotcmd->add_option("world", plot.world, "world JSON file")->required();
  plotcmd->add_option("--trajectory", plot.trajectories, "trajectory CSV (repeatable)");
  plotcmd->add_option("--failed", plot.failed, "trajectory CSV drawn with a red endpoint (repeatable)");
  plotcmd->add_option("--out", plot.out, "SVG path")->capture_default_str();
  plotcmd->add_option("--quiver", plot.quiver_flow, "flow drawn as a quiver (nav, old, new, phi)");
  plotcmd->add_option("--k", plot.k, "k for the quiver")->capture_default_str();
  plotcmd->add_option("--grid", plot.grid, "quiver arrows per side")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*benchmark) return cmd_benchmark(bench);
    if (*graph) return cmd_graph(graph_world, graph_json);
    if (*check) return cmd_check(chk);
    if (*gencmd) return cmd_gen(gen);
    if (*plotcmd) return cmd_plot(plot);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
