#include "navflow/worldgen.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/QR>

#include "navflow/analysis.hpp"
#include "navflow/errors.hpp"
#include "navflow/separation.hpp"

namespace navflow {

void GenConfig::validate() const {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw ValidationError("r0 must be positive");
  if (dimension < 2) throw DimensionError("dimension must be at least 2");
  if (max_redraws < 1) throw ValidationError("max_redraws must be at least 1");
}

namespace {

class Redraws {
 public:
  explicit Redraws(std::size_t limit) : limit_(limit) {}
  void spend(const char* what) {
    if (++used_ > limit_) {
      throw GenerationError(std::string("world generation exceeded max_redraws while placing ") + what);
    }
  }

 private:
  std::size_t limit_;
  std::size_t used_ = 0;
};

bool fits(const Workspace& ws, const std::vector<Ellipsoid>& placed, const Ellipsoid& e) {
  if (!(max_workspace_form(ws, e) < ws.r0() * ws.r0())) return false;
  const ConvexSet set = ConvexSet::of(e);
  for (const auto& other : placed) {
    if (!(convex_distance(set, ConvexSet::of(other)).distance > kSeparationTolerance)) return false;
  }
  return true;
}

bool strictly_interior(const Workspace& ws, const std::vector<Ellipsoid>& obstacles, const Vector& x) {
  if (!(ws.value(x) > kInteriorMargin)) return false;
  for (const auto& o : obstacles) {
    if (!(o.value(x) > kInteriorMargin)) return false;
  }
  return true;
}

Vector uniform_box(Rng& rng, int n, double half) {
  Vector x(n);
  for (int j = 0; j < n; ++j) x[j] = rng.uniform(-half, half);
  return x;
}

// Shared skeleton: obstacles one by one, then the potential shape, then x*.
World assemble(const GenConfig& cfg, const std::function<Ellipsoid(Rng&)>& draw_obstacle,
               const std::function<SpdMatrix(Rng&)>& draw_q) {
  cfg.validate();
  Rng rng(cfg.seed);
  Redraws budget(cfg.max_redraws);
  Workspace ws = Workspace::ball(cfg.dimension, cfg.r0);
  std::vector<Ellipsoid> obstacles;
  obstacles.reserve(cfg.m);
  while (obstacles.size() < cfg.m) {
    Ellipsoid e = draw_obstacle(rng);
    if (fits(ws, obstacles, e)) {
      obstacles.push_back(std::move(e));
    } else {
      budget.spend("an obstacle");
    }
  }
  SpdMatrix q = draw_q(rng);
  Vector target = uniform_box(rng, cfg.dimension, 0.5 * cfg.r0);
  while (!strictly_interior(ws, obstacles, target)) {
    budget.spend("the target");
    target = uniform_box(rng, cfg.dimension, 0.5 * cfg.r0);
  }
  return World(std::move(ws), std::move(obstacles), QuadraticPotential(std::move(q), std::move(target)));
}

double draw_radius(Rng& rng, double r0) { return rng.uniform(r0 / 10.0, r0 / 5.0); }

// lambda in (0, r0]
double draw_lambda(Rng& rng, double r0) { return r0 * (1.0 - rng.uniform()); }

SpdMatrix draw_diagonal_q(Rng& rng, const GenConfig& cfg) {
  Vector eig(cfg.dimension);
  eig[0] = 1.0;
  for (int j = 1; j < cfg.dimension; ++j) eig[j] = draw_lambda(rng, cfg.r0);
  return SpdMatrix::diagonal(eig);
}

}  // namespace

World gen_world_2d(const GenConfig& cfg) {
  if (cfg.dimension != 2) throw DimensionError("gen_world_2d requires dimension 2");
  const double r0 = cfg.r0;
  auto obstacle = [r0](Rng& rng) {
    Vector c(2);
    c[0] = rng.uniform(-r0 / 2.0, r0 / 2.0);
    c[1] = rng.uniform(-r0 / 2.0, r0 / 2.0);
    const double r = draw_radius(rng, r0);
    const double mu = rng.uniform(1.0, r0 / 2.0);
    const double theta = rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
    Matrix rot(2, 2);
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Vector eig(2);
    eig << 1.0, mu;
    return Ellipsoid(SpdMatrix::from_spectrum(rot, eig), c, r);
  };
  return assemble(cfg, obstacle, [&cfg](Rng& rng) { return draw_diagonal_q(rng, cfg); });
}

Vector gen_start(const World& w, const GenConfig& cfg) {
  cfg.validate();
  if (w.dimension() != cfg.dimension) throw DimensionError("gen_start: dimension mismatch");
  Rng rng(split_seed(cfg.seed, kStartStream));
  for (std::size_t attempt = 0; attempt <= cfg.max_redraws; ++attempt) {
    Vector x = uniform_box(rng, cfg.dimension, cfg.r0);
    if (strictly_interior(w.workspace(), w.obstacles(), x)) return x;
  }
  throw GenerationError("gen_start exceeded max_redraws");
}

Matrix random_rotation(Rng& rng, int n) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

World gen_world_nd(const GenConfig& cfg, const NdOptions& options) {
  cfg.validate();
  if (!(options.ratio_min >= 1.0) || !(options.ratio_max >= options.ratio_min)) {
    throw ValidationError("eccentricity range must satisfy 1 <= min <= max");
  }
  for (double r : options.radius_choices) {
    if (!(r > 0.0)) throw ValidationError("radius choices must be positive");
  }
  const int n = cfg.dimension;
  const double r0 = cfg.r0;
  auto obstacle = [&](Rng& rng) {
    const Vector c = uniform_box(rng, n, r0 / 2.0);
    const double r = options.radius_choices.empty()
                         ? draw_radius(rng, r0)
                         : options.radius_choices[rng.below(options.radius_choices.size())];
    const double ratio = rng.uniform(options.ratio_min, options.ratio_max);
    Vector eig(n);
    eig[0] = 1.0;
    eig[n - 1] = ratio;
    for (int j = 1; j < n - 1; ++j) eig[j] = std::exp(rng.uniform() * std::log(ratio));
    const Matrix rot = random_rotation(rng, n);
    return Ellipsoid(SpdMatrix::from_spectrum(rot, eig), c, r);
  };
  auto q = [&cfg](Rng& rng) { return draw_diagonal_q(rng, cfg); };
  if (!options.require_condition_violation) return assemble(cfg, obstacle, q);

  GenConfig attempt = cfg;
  for (std::size_t a = 0; a <= cfg.max_redraws; ++a) {
    attempt.seed = a == 0 ? cfg.seed : split_seed(cfg.seed, a);
    World w = assemble(attempt, obstacle, q);
    if (!check_condition(w).overall) return w;
  }
  throw GenerationError("gen_world_nd: no condition-violating world within max_redraws");
}

World gen_sphere_world(const GenConfig& cfg) {
  const int n = cfg.dimension;
  const double r0 = cfg.r0;
  auto obstacle = [n, r0](Rng& rng) {
    const Vector c = uniform_box(rng, n, r0 / 2.0);
    return Ellipsoid(SpdMatrix::identity(n), c, draw_radius(rng, r0));
  };
  return assemble(cfg, obstacle, [n](Rng&) { return SpdMatrix::identity(n); });
}

}  // namespace navflow
