#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "navflow/geometry.hpp"
#include "navflow/integrate.hpp"

namespace navflow {

// World file (JSON):
//   {"dimension": n,
//    "potential": {"Q": [[row], ...], "target": [n]},
//    "workspace": {"A0": [[row], ...], "center": [n], "r0": r},
//    "obstacles": [{"A": [[row], ...], "center": [n], "radius": r}, ...]}
// Matrices are lists of rows; a flat row-major list of n*n numbers is also
// accepted. Reals are written with 17 significant digits.
std::string serialize_world(const World& w);
// Errors carry "<source>:<line>:<column>" for syntax problems and the JSON
// path for shape problems. Throws ValidationError.
World parse_world(std::string_view text, const std::string& source = "<world>");
World load_world(const std::filesystem::path& path);
void save_world(const std::filesystem::path& path, const World& w);

// CSV: step, x_0..x_{n-1}, V, phi_k, grad_norm. Diagnostic columns are empty
// when the trajectory carries no diagnostics.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct RunMetadata {
  std::string world_source;
  SimConfig config;
  Vector start;
};

// Status sidecar (JSON): status, steps, min_beta_seen, start, final state,
// and the run configuration.
std::string status_json(const Trajectory& traj, const RunMetadata& meta);

// CSV: step, obstacle_index
void write_discovery_csv(std::ostream& out, const Trajectory& traj);

struct TrajectoryTable {
  std::vector<std::string> header;
  std::vector<Vector> states;
};

// Reads the state columns back from a trajectory CSV.
TrajectoryTable read_trajectory_csv(std::istream& in);

}  // namespace navflow
