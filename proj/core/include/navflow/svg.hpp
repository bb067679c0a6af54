#pragma once

#include <optional>
#include <string>
#include <vector>

#include "navflow/geometry.hpp"
#include "navflow/integrate.hpp"

namespace navflow {

struct PlotPath {
  std::vector<Vector> states;
  bool failed = false;  // endpoint drawn as a red square
};

struct PlotOptions {
  int width = 720;
  int height = 720;
  int level_sets = 8;
  int quiver_grid = 24;  // arrows per side; 0 disables the quiver
  // Field drawn as the quiver; none when unset.
  std::optional<SimConfig> quiver;
};

// Planar worlds only: workspace outline, obstacles, level sets of f0, target,
// optional normalized vector field and the trajectories.
std::string render_svg(const World& w, const std::vector<PlotPath>& paths, const PlotOptions& options = {});

}  // namespace navflow
