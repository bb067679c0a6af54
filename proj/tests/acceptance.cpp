// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "navflow/navflow.hpp"
#include "oracles.hpp"
#include "precise.hpp"
#include "support.hpp"

using namespace navflow;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Accepted states outside the free space, over every run made here.
std::size_t g_unsafe_states = 0;
std::size_t g_checked_runs = 0;

void audit(const World& w, const Trajectory& t) {
  ++g_checked_runs;
  for (std::size_t s = 0; s < t.accepted_count(); ++s) g_unsafe_states += !in_free_space(w, t.states[s]);
}

std::string pct(double r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

// --- 1 and 2: the planar benchmark -------------------------------------------

const std::vector<double> kBenchKs{20.0, 40.0, 60.0};
const std::vector<std::size_t> kBenchMs{2, 3, 4, 5, 6, 7};

const BenchmarkReport& planar_benchmark() {
  static const BenchmarkReport report = [] {
    SweepConfig cfg;
    cfg.ks = kBenchKs;
    cfg.ms = kBenchMs;
    cfg.trials = 100;
    cfg.flows = {Dynamics::kNavFn, Dynamics::kCurvatureCorrected};
    const BenchmarkReport r = run_sweep(cfg);
    g_unsafe_states += r.total_safety_violations();
    g_checked_runs += cfg.ks.size() * cfg.ms.size() * cfg.trials * cfg.flows.size();
    return r;
  }();
  return report;
}

std::string row(const BenchmarkReport& r, Dynamics flow, double k) {
  std::string s = to_string(flow) + " k=" + std::to_string(static_cast<int>(k)) + ":";
  for (std::size_t m : kBenchMs) s += " " + pct(r.cell(flow, k, m).success_ratio());
  return s;
}

Verdict criterion1() {
  const BenchmarkReport& r = planar_benchmark();
  bool gate = true, strict = true;
  for (std::size_t m : kBenchMs) {
    const double at40 = r.cell(Dynamics::kCurvatureCorrected, 40.0, m).success_ratio();
    const double at60 = r.cell(Dynamics::kCurvatureCorrected, 60.0, m).success_ratio();
    gate = gate && at40 >= 0.80 && at60 >= 0.90;
    strict = strict && at40 >= 0.85 && at60 >= 0.95;
  }
  return {gate && strict, row(r, Dynamics::kCurvatureCorrected, 40.0) + "; " + row(r, Dynamics::kCurvatureCorrected, 60.0) +
                             " (gates 0.80/0.90: " + (gate ? "met" : "missed") + ", 0.85/0.95: " +
                             (strict ? "met" : "missed") + ")"};
}

Verdict criterion2() {
  const BenchmarkReport& r = planar_benchmark();
  bool pass = true;
  std::string detail;
  for (double k : kBenchKs) {
    int inversions = 0;
    bool small = true;
    for (std::size_t a = 0; a + 1 < kBenchMs.size(); ++a) {
      const double rise = r.cell(Dynamics::kNavFn, k, kBenchMs[a + 1]).success_ratio() -
                          r.cell(Dynamics::kNavFn, k, kBenchMs[a]).success_ratio();
      if (rise > 1e-12) {
        ++inversions;
        small = small && rise <= 0.03 + 1e-12;
      }
    }
    const bool monotone = inversions == 0 || (inversions == 1 && small);
    const bool below = r.cell(Dynamics::kNavFn, k, 7).success_ratio() < r.cell(Dynamics::kCurvatureCorrected, k, 7).success_ratio();
    pass = pass && monotone && below;
    detail += row(r, Dynamics::kNavFn, k) + " [" + std::to_string(inversions) + " rises, nav<new at m=7: " +
              (below ? "yes" : "no") + "]; ";
  }
  return {pass, detail};
}

// --- 3: sphere worlds --------------------------------------------------------

Verdict criterion3() {
  SweepConfig cfg;
  cfg.ks = {20.0};
  cfg.ms = {1, 2, 3, 4, 5};
  cfg.trials = 20;
  cfg.family = WorldFamily::kSphere;
  cfg.flows = {Dynamics::kNavFn, Dynamics::kSecondOrder, Dynamics::kCurvatureCorrected};
  const BenchmarkReport r = run_sweep(cfg);
  g_unsafe_states += r.total_safety_violations();
  g_checked_runs += 5 * 20 * 3;
  bool pass = true;
  std::string detail = "100 worlds (m=1..5, 20 each):";
  for (Dynamics flow : cfg.flows) {
    std::size_t ok = 0, coll = 0, total = 0;
    for (std::size_t m : cfg.ms) {
      const CellResult& c = r.cell(flow, 20.0, m);
      ok += c.successes;
      coll += c.collisions;
      total += c.trials;
    }
    pass = pass && ok == 100 && total == 100 && coll == 0;
    detail += " " + to_string(flow) + " " + std::to_string(ok) + "/" + std::to_string(total) + " success, " +
              std::to_string(coll) + " collisions;";
  }
  return {pass, detail};
}

// --- 5: Lyapunov sign identity ------------------------------------------------

Verdict criterion5() {
  std::size_t samples = 0, disagreements = 0, violating = 0;
  for (std::uint64_t world = 0; world < 20; ++world) {
    GenConfig g;
    g.m = 2 + world % 6;
    g.seed = split_seed(505, world);
    const World w = gen_world_2d(g);
    Rng rng(split_seed(506, world));
    const double k = kBenchKs[world % 3];
    for (int s = 0; s < 10000;) {
      const Vector x = navtest::sample_free(w, rng);
      if ((x - w.target()).squaredNorm() <= kDefaultTargetBall) continue;
      ++s;
      ++samples;
      const bool decreasing = global_Vdot(w, FlowParams{k}, x, FlowKind::kCurvatureCorrected) < 0.0;
      const bool in_set = in_violation_set(w, k, kDefaultTargetBall, x);
      disagreements += decreasing == in_set;
      violating += in_set;
    }
  }
  return {disagreements == 0, std::to_string(samples) + " samples over 20 worlds, " + std::to_string(violating) +
                                  " in the violation set, " + std::to_string(disagreements) + " disagreements"};
}

// --- 6: gradients against central differences ---------------------------------

Verdict criterion6() {
  const std::size_t points = 1000;
  double worst_phi = 0, worst_partial = 0, worst_beta = 0;
  std::size_t bad = 0;
  for (std::size_t t = 0; t < points; ++t) {
    GenConfig g;
    g.m = 1 + t % 5;
    g.seed = split_seed(606, t / 50);
    const World w = gen_world_2d(g);
    Rng rng(split_seed(607, t));
    const Vector x = navtest::sample_free(w, rng);
    const double k = kBenchKs[t % 3];

    const double e1 = navtest::rel_err(
        grad_phi_k(w, k, x), navtest::precise_fd([&](const navtest::PreciseVec& y) { return navtest::precise_phi(w, k, y); }, x));

    // Awareness: a random subset of the obstacles, discovered at their boundaries.
    AwarenessState aware(1e-9);
    for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
      if (rng.uniform() < 0.5) continue;
      const Ellipsoid& o = w.obstacle(i);
      const Vector u = Vector::Unit(2, 0);
      aware = update_awareness(aware, w, o.center() + o.radius() / std::sqrt(o.a().quadratic_form(u)) * u);
    }
    const std::set<std::size_t> known = aware.discovered();
    const double e2 = navtest::rel_err(
        partial_grad(w, aware, k, x),
        navtest::precise_fd([&](const navtest::PreciseVec& y) { return navtest::precise_phi(w, k, y, &known); }, x));

    const double e3 = navtest::rel_err(
        grad_beta(w, x), navtest::precise_fd([&](const navtest::PreciseVec& y) { return navtest::precise_beta(w, y); }, x));

    worst_phi = std::max(worst_phi, e1);
    worst_partial = std::max(worst_partial, e2);
    worst_beta = std::max(worst_beta, e3);
    bad += (e1 >= 1e-5) + (e2 >= 1e-5) + (e3 >= 1e-5);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu points; worst relative error grad_phi_k %.2e, partial_grad %.2e, grad_beta %.2e", points,
                worst_phi, worst_partial, worst_beta);
  return {bad == 0, buf};
}

// --- 7: configuration-graph oracle ---------------------------------------------

Verdict criterion7() {
  std::size_t mismatches = 0, edges = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    GenConfig g;
    g.m = 2;
    g.seed = split_seed(707, t);
    const World w = gen_world_2d(g);
    const ConfigGraph graph = build_config_graph(w);
    for (const auto& p : graph.pairs) {
      mismatches += p.condition1 != navtest::sweep_condition1(w, p.i, p.j);
      mismatches += p.condition2 != navtest::sweep_condition1(w, p.j, p.i);
    }
    edges += graph.edges.size();
  }
  // Target between two flanking obstacles.
  const World flank = navtest::planar_world({navtest::circle(-5, 0, 2), navtest::circle(5, 0, 2)}, navtest::vec({0, 0}));
  const ConfigGraph fg = build_config_graph(flank);
  bool fixture = fg.edges.empty();
  for (const auto& p : fg.pairs) {
    fixture = fixture && p.condition1 == navtest::sweep_condition1(flank, p.i, p.j) &&
              p.condition2 == navtest::sweep_condition1(flank, p.j, p.i);
  }
  return {mismatches == 0 && fixture, "50 worlds, " + std::to_string(edges) + " edges, " + std::to_string(mismatches) +
                                          " verdict mismatches; flanking fixture " + (fixture ? "has no edges" : "FAILED")};
}

// --- 8: switched controller ---------------------------------------------------

Verdict criterion8() {
  // Full discovery at step 0.
  double worst = 0;
  std::size_t compared = 0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    GenConfig g;
    g.m = 1 + t % 5;
    g.seed = split_seed(808, t);
    const World w = gen_world_2d(g);
    const Vector x0 = gen_start(w, g);
    SimConfig full;
    full.flow = Dynamics::kGradientNavFn;
    full.k = 40;
    full.max_steps = 20000;
    SimConfig sw = full;
    sw.flow = Dynamics::kSwitchedNavFn;
    sw.sensor_range_c = 1e12;
    const Trajectory a = run(w, full, x0);
    const Trajectory b = run(w, sw, x0);
    audit(w, a);
    audit(w, b);
    if (a.states.size() != b.states.size() || b.discovery_log.size() != w.obstacle_count()) {
      worst = INFINITY;
      continue;
    }
    for (std::size_t s = 0; s < a.states.size(); ++s) worst = std::max(worst, (a.states[s] - b.states[s]).norm());
    compared += a.states.size();
  }

  // Small sensor range on condition-satisfying worlds: 50 sphere worlds and 50
  // low-eccentricity ellipse worlds.
  std::size_t ok = 0, runs = 0, log_ok = 0;
  NdOptions mild;
  mild.ratio_max = 1.5;
  for (std::uint64_t t = 0; runs < 100; ++t) {
    GenConfig g;
    g.m = 2 + t % 4;
    g.seed = split_seed(809, t);
    const World w = runs < 50 ? gen_sphere_world(g) : gen_world_nd(g, mild);
    if (!check_condition(w).overall) continue;
    SimConfig cfg;
    cfg.flow = Dynamics::kSwitchedNavFn;
    cfg.k = 20;
    cfg.sensor_range_c = 1.0;
    cfg.eta = std::min(cfg.eta, 0.5 * max_safe_step(w, 1.0));
    cfg.max_steps = 200000;
    const Trajectory tr = run(w, cfg, gen_start(w, g));
    audit(w, tr);
    ++runs;
    if (tr.status == Status::kSuccess) {
      ++ok;
      log_ok += tr.discovery_log.size() <= w.obstacle_count();
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "full discovery: %zu states, max deviation %.1e; c=1: %zu/%zu success, %zu finite discovery logs", compared,
                worst, ok, runs, log_ok);
  return {worst <= 1e-12 && ok >= 99 && log_ok == ok, buf};
}

// --- 9: lemma-level numerics ----------------------------------------------------

Verdict criterion9() {
  const std::vector<double> ks{5, 10, 20, 40, 80};
  bool shrink = true, outward = true, unstable = true;
  std::string thresholds, eigen;
  for (std::uint64_t t = 0; t < 10; ++t) {
    GenConfig g;
    g.m = 1;
    g.seed = split_seed(909, t);
    const World w = gen_world_2d(g);

    std::vector<std::size_t> census(ks.size(), 0);
    for (int a = 0; a < 200; ++a) {
      for (int b = 0; b < 200; ++b) {
        const Vector x = navtest::vec({-20 + 0.2 * a + 0.1, -20 + 0.2 * b + 0.1});
        if (!in_free_space(w, x) || (x - w.target()).squaredNorm() <= kDefaultTargetBall) continue;
        for (std::size_t j = 0; j < ks.size(); ++j) census[j] += in_repulsion_zone(w, ks[j], kDefaultTargetBall, x, 0);
      }
    }
    for (std::size_t j = 1; j < ks.size(); ++j) shrink = shrink && census[j] <= census[j - 1];

    const OutwardMotionReport om = outward_motion_threshold(w, 0, 64, 1.0, 4096.0);
    outward = outward && om.threshold.has_value();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.3g", t ? " " : "", om.threshold ? *om.threshold : NAN);
    thresholds += buf;

    const EquilibriumReport eq = aligned_equilibrium(w, 20, 0);
    unstable = unstable && eq.found && eq.max_real_eigenvalue > 0.0;
    std::snprintf(buf, sizeof buf, "%s%.2e", t ? " " : "", eq.found ? eq.max_real_eigenvalue : NAN);
    eigen += buf;
  }
  return {shrink && outward && unstable, std::string("zone census monotone: ") + (shrink ? "yes" : "no") +
                                             "; outward-motion k thresholds: " + thresholds +
                                             "; max Re(eig) at k=20: " + eigen};
}

// --- 4: safety over everything above -------------------------------------------

Verdict criterion4() {
  return {g_unsafe_states == 0, std::to_string(g_checked_runs) + " runs audited, " + std::to_string(g_unsafe_states) +
                                    " accepted states outside the free space"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Verdict()>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {5, criterion5}, {6, criterion6},
      {7, criterion7}, {8, criterion8}, {9, criterion9}, {4, criterion4}};
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  // Safety is judged last, over every run the other criteria made.
  std::map<int, Verdict> results;
  for (const auto& [id, fn] : criteria) {
    if (id == 4 || !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    results[id] = fn();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results[id].detail += " [" + pct(secs) + " s]";
  }
  if (selected.count(4)) {
    if (selected.size() == 1) {
      planar_benchmark();
      criterion3();
      criterion8();
    }
    results[4] = criterion4();
  }

  int failed = 0;
  for (const auto& [id, v] : results) {
    std::printf("criterion %d: %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    failed += !v.pass;
  }
  std::fflush(stdout);
  return failed ? 1 : 0;
}
