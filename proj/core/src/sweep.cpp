#include "navflow/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "navflow/errors.hpp"
#include "navflow/random.hpp"
#include "navflow/worldgen.hpp"

namespace navflow {

std::string to_string(WorldFamily f) { return f == WorldFamily::kSphere ? "sphere" : "planar"; }

WorldFamily parse_world_family(std::string_view name) {
  if (name == "planar" || name == "ellipsoid") return WorldFamily::kPlanar;
  if (name == "sphere") return WorldFamily::kSphere;
  throw ValidationError("unknown world family '" + std::string(name) + "'");
}

void SweepConfig::validate() const {
  if (ks.empty() || ms.empty() || flows.empty()) throw ValidationError("sweep needs k, m and flow lists");
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (jobs < 1) throw ValidationError("jobs must be at least 1");
  if (family == WorldFamily::kPlanar && dimension != 2) {
    throw ValidationError("planar worlds are two-dimensional");
  }
  for (Dynamics d : flows) {
    if (d == Dynamics::kSwitchedNavFn && !base.sensor_range_c) {
      throw ValidationError("switched sweeps need a sensor range");
    }
  }
  for (double k : ks) {
    SimConfig c = base;
    c.k = k;
    c.validate();
  }
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t m, std::size_t trial) {
  return split_seed(split_seed(master, m), trial);
}

const CellResult& BenchmarkReport::cell(Dynamics flow, double k, std::size_t m) const {
  for (const auto& c : cells) {
    if (c.flow == flow && c.k == k && c.m == m) return c;
  }
  throw std::out_of_range("no benchmark cell for " + to_string(flow) + ", k=" + std::to_string(k) +
                          ", m=" + std::to_string(m));
}

std::size_t BenchmarkReport::total_safety_violations() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.safety_violations;
  return n;
}

namespace {

struct Instance {
  std::optional<World> world;
  Vector start;
};

Instance make_instance(const SweepConfig& cfg, std::size_t m, std::size_t trial) {
  GenConfig g;
  g.r0 = cfg.r0;
  g.m = m;
  g.dimension = cfg.dimension;
  g.seed = trial_seed(cfg.master_seed, m, trial);
  Instance inst;
  try {
    World w = cfg.family == WorldFamily::kSphere ? gen_sphere_world(g) : gen_world_2d(g);
    inst.start = gen_start(w, g);
    inst.world.emplace(std::move(w));
  } catch (const GenerationError&) {
  }
  return inst;
}

struct Outcome {
  Status status = Status::kTimeout;
  std::size_t steps = 0;
  bool numerical_error = false;
  std::size_t unsafe = 0;
};

Outcome simulate(const World& w, const SimConfig& c, const Vector& x0) {
  Outcome o;
  try {
    const Trajectory t = run(w, c, x0);
    o.status = t.status;
    o.steps = t.steps;
    for (std::size_t s = 0; s < t.accepted_count(); ++s) {
      if (!in_free_space(w, t.states[s])) ++o.unsafe;
    }
  } catch (const NumericalError&) {
    o.numerical_error = true;
  }
  return o;
}

}  // namespace

BenchmarkReport run_sweep(const SweepConfig& cfg, const SweepProgress& progress) {
  cfg.validate();
  BenchmarkReport report;
  report.config = cfg;

  const std::size_t nf = cfg.flows.size(), nk = cfg.ks.size(), nm = cfg.ms.size();
  auto cell_index = [&](std::size_t f, std::size_t k, std::size_t m) { return (f * nk + k) * nm + m; };
  report.cells.resize(nf * nk * nm);
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t k = 0; k < nk; ++k) {
      for (std::size_t m = 0; m < nm; ++m) {
        CellResult& c = report.cells[cell_index(f, k, m)];
        c.flow = cfg.flows[f];
        c.k = cfg.ks[k];
        c.m = cfg.ms[m];
      }
    }
  }

  // One task per (m, trial); the world is generated once and shared by all
  // flows and k values.
  const std::size_t total = nm * cfg.trials;
  std::vector<std::size_t> steps_sum(report.cells.size(), 0);
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const std::size_t mi = task / cfg.trials;
      const std::size_t trial = task % cfg.trials;
      try {
        const Instance inst = make_instance(cfg, cfg.ms[mi], trial);
        std::vector<std::pair<std::size_t, Outcome>> results;
        if (inst.world) {
          for (std::size_t f = 0; f < nf; ++f) {
            for (std::size_t k = 0; k < nk; ++k) {
              SimConfig c = cfg.base;
              c.k = cfg.ks[k];
              c.flow = cfg.flows[f];
              c.seed = trial_seed(cfg.master_seed, cfg.ms[mi], trial);
              results.emplace_back(cell_index(f, k, mi), simulate(*inst.world, c, inst.start));
            }
          }
        }
        std::lock_guard<std::mutex> lock(mu);
        if (!inst.world) {
          for (std::size_t f = 0; f < nf; ++f) {
            for (std::size_t k = 0; k < nk; ++k) ++report.cells[cell_index(f, k, mi)].gen_failures;
          }
        }
        for (const auto& [idx, o] : results) {
          CellResult& c = report.cells[idx];
          ++c.trials;
          c.safety_violations += o.unsafe;
          if (o.numerical_error) {
            ++c.numerical_errors;
            ++c.timeouts;
            continue;
          }
          switch (o.status) {
            case Status::kSuccess:
              ++c.successes;
              steps_sum[idx] += o.steps;
              break;
            case Status::kCollision: ++c.collisions; break;
            case Status::kTimeout: ++c.timeouts; break;
            case Status::kLocalMinimum: ++c.local_minima; break;
          }
        }
        ++done;
        if (progress) progress(done, total);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = total;
        return;
      }
    }
  };

  const std::size_t threads = std::min(cfg.jobs, total);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    CellResult& c = report.cells[i];
    c.mean_steps = c.successes ? static_cast<double>(steps_sum[i]) / c.successes : 0.0;
  }
  return report;
}

void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "flow,k,m,trials,successes,collisions,timeouts,local_minima,gen_failures,success_ratio,mean_steps\n";
  char buf[64];
  for (const auto& c : report.cells) {
    out << to_string(c.flow) << ',';
    std::snprintf(buf, sizeof buf, "%g", c.k);
    out << buf << ',' << c.m << ',' << c.trials << ',' << c.successes << ',' << c.collisions << ','
        << c.timeouts << ',' << c.local_minima << ',' << c.gen_failures << ',';
    std::snprintf(buf, sizeof buf, "%.4f,%.1f", c.success_ratio(), c.mean_steps);
    out << buf << '\n';
  }
}

std::string report_json(const BenchmarkReport& report) {
  using nlohmann::json;
  const SweepConfig& s = report.config;
  json j;
  json flows = json::array();
  for (Dynamics d : s.flows) flows.push_back(to_string(d));
  j["protocol"] = {{"family", to_string(s.family)},
                   {"dimension", s.dimension},
                   {"r0", s.r0},
                   {"trials", s.trials},
                   {"master_seed", s.master_seed},
                   {"rng", Rng::kName},
                   {"eta", s.base.eta},
                   {"epsilon_norm", s.base.epsilon_norm},
                   {"max_steps", s.base.max_steps},
                   {"ks", s.ks},
                   {"ms", s.ms},
                   {"flows", flows}};
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"flow", to_string(c.flow)},
                     {"k", c.k},
                     {"m", c.m},
                     {"trials", c.trials},
                     {"successes", c.successes},
                     {"collisions", c.collisions},
                     {"timeouts", c.timeouts},
                     {"local_minima", c.local_minima},
                     {"gen_failures", c.gen_failures},
                     {"numerical_errors", c.numerical_errors},
                     {"safety_violations", c.safety_violations},
                     {"success_ratio", c.success_ratio()},
                     {"mean_steps", c.mean_steps}});
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

}  // namespace navflow
