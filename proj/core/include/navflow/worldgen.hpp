#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "navflow/geometry.hpp"
#include "navflow/random.hpp"

namespace navflow {

struct GenConfig {
  double r0 = 20.0;
  std::size_t m = 0;
  int dimension = 2;
  std::uint64_t seed = 0;
  std::size_t max_redraws = 10000;

  void validate() const;
};

// beta_i(x) > margin and beta_0(x) > margin for targets and starts.
inline constexpr double kInteriorMargin = 1e-6;

// Planar protocol. Per obstacle: center ~ U[-r0/2, r0/2]^2, largest semiaxis
// r ~ U[r0/10, r0/5], A eigenvalues {1, mu} with mu ~ U[1, r0/2], rotation
// angle ~ U[-pi/2, pi/2]; the newest obstacle is redrawn until it is
// disjoint from the others and inside the workspace. Then Q = diag(1, lambda)
// with lambda ~ U(0, r0] and x* ~ U[-r0/2, r0/2]^2 redrawn until interior.
World gen_world_2d(const GenConfig& cfg);

// Uniform on [-r0, r0]^n, redrawn until strictly inside the free space.
// Draws from split_seed(cfg.seed, kStartStream).
inline constexpr std::uint64_t kStartStream = 0x57A27;
Vector gen_start(const World& w, const GenConfig& cfg);

struct NdOptions {
  // Range of mu_max / mu_min; the extreme ratio is uniform in the range and
  // intermediate eigenvalues are log-uniform between the extremes.
  double ratio_min = 1.0;
  double ratio_max = 10.0;
  // Radius drawn uniformly from this list; empty means U[r0/10, r0/5].
  std::vector<double> radius_choices;
  // Regenerate until check_condition fails for at least one obstacle.
  bool require_condition_violation = false;
};

// Random orthogonal matrix: QR of a standard normal matrix with the signs of
// R's diagonal folded into Q.
Matrix random_rotation(Rng& rng, int n);

World gen_world_nd(const GenConfig& cfg, const NdOptions& options);

// A_i = I and Q = I; centers and radii as in the planar protocol.
World gen_sphere_world(const GenConfig& cfg);

}  // namespace navflow
