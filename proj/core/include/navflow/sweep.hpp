#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "navflow/integrate.hpp"

namespace navflow {

enum class WorldFamily { kPlanar, kSphere };

std::string to_string(WorldFamily f);
WorldFamily parse_world_family(std::string_view name);

struct SweepConfig {
  std::vector<double> ks{20.0, 40.0, 60.0};
  std::vector<std::size_t> ms{2, 3, 4, 5, 6, 7};
  std::size_t trials = 100;
  std::vector<Dynamics> flows{Dynamics::kCurvatureCorrected};
  WorldFamily family = WorldFamily::kPlanar;
  int dimension = 2;
  double r0 = 20.0;
  std::uint64_t master_seed = 2019;
  // eta, epsilon_norm, max_steps and the stuck detector; k and flow are overridden per cell.
  SimConfig base;
  std::size_t jobs = 1;

  void validate() const;
};

// World seed for trial t of obstacle count m; shared by every k and flow.
std::uint64_t trial_seed(std::uint64_t master, std::size_t m, std::size_t trial);

struct CellResult {
  Dynamics flow = Dynamics::kCurvatureCorrected;
  double k = 0.0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t collisions = 0;
  std::size_t timeouts = 0;
  std::size_t local_minima = 0;
  std::size_t gen_failures = 0;     // not part of `trials`
  std::size_t numerical_errors = 0;  // counted as timeouts
  std::size_t safety_violations = 0;  // accepted states outside free space
  double mean_steps = 0.0;           // over successful runs

  double success_ratio() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

struct BenchmarkReport {
  SweepConfig config;
  std::vector<CellResult> cells;  // ordered by flow, k, m

  const CellResult& cell(Dynamics flow, double k, std::size_t m) const;
  std::size_t total_safety_violations() const;
};

using SweepProgress = std::function<void(std::size_t done, std::size_t total)>;

BenchmarkReport run_sweep(const SweepConfig& cfg, const SweepProgress& progress = {});

// flow,k,m,trials,successes,collisions,timeouts,local_minima,gen_failures,success_ratio,mean_steps
void write_report_csv(std::ostream& out, const BenchmarkReport& report);
// Protocol metadata plus every cell.
std::string report_json(const BenchmarkReport& report);

}  // namespace navflow
