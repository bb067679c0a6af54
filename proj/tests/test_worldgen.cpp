#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace navflow;

namespace {

GenConfig config(std::size_t m, std::uint64_t seed, int dimension = 2) {
  GenConfig g;
  g.m = m;
  g.seed = seed;
  g.dimension = dimension;
  return g;
}

bool same_world(const World& a, const World& b) {
  if (a.obstacle_count() != b.obstacle_count()) return false;
  if (a.target() != b.target() || a.potential().q().matrix() != b.potential().q().matrix()) return false;
  for (std::size_t i = 0; i < a.obstacle_count(); ++i) {
    const Ellipsoid &x = a.obstacle(i), &y = b.obstacle(i);
    if (x.center() != y.center() || x.radius() != y.radius() || x.a().matrix() != y.a().matrix()) return false;
  }
  return true;
}

// Running mean and standard error.
struct Moments {
  double sum = 0, sum_sq = 0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return sum / n; }
  double std_error() const { return std::sqrt((sum_sq / n - mean() * mean()) / n); }
};

}  // namespace

TEST_CASE("empty worlds are valid") {
  const World w = gen_world_2d(config(0, 1));
  CHECK(w.obstacle_count() == 0);
  CHECK(validate_world(w).empty());
  CHECK(w.potential().q().matrix()(0, 0) == 1.0);
}

TEST_CASE("generation is deterministic in the seed") {
  for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
    CHECK(same_world(gen_world_2d(config(5, seed)), gen_world_2d(config(5, seed))));
    CHECK(same_world(gen_sphere_world(config(4, seed)), gen_sphere_world(config(4, seed))));
    const World w = gen_world_2d(config(5, seed));
    CHECK(gen_start(w, config(5, seed)) == gen_start(w, config(5, seed)));
  }
  CHECK_FALSE(same_world(gen_world_2d(config(5, 1)), gen_world_2d(config(5, 2))));
}

TEST_CASE("generated worlds pass validation") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const std::size_t m = 1 + seed % 7;
    const GenConfig g = config(m, seed);
    const World w = gen_world_2d(g);
    REQUIRE(w.obstacle_count() == m);
    CHECK(validate_world(w).empty());
    const Vector x0 = gen_start(w, g);
    CHECK(in_free_space(w, x0));
    CHECK(x0.cwiseAbs().maxCoeff() <= g.r0);
    for (const auto& o : w.obstacles()) {
      CHECK(o.mu_min() == doctest::Approx(1.0));
      CHECK(o.mu_max() <= g.r0 / 2 + 1e-9);
      CHECK(o.semi_axes().maxCoeff() == doctest::Approx(o.radius()));
    }
  }
}

TEST_CASE("sphere worlds use identity shapes") {
  const World w = gen_sphere_world(config(6, 3));
  CHECK(validate_world(w).empty());
  CHECK(w.potential().q().matrix() == Matrix::Identity(2, 2));
  for (const auto& o : w.obstacles()) CHECK(o.a().matrix() == Matrix::Identity(2, 2));
}

TEST_CASE("random rotations are orthogonal") {
  Rng rng(12);
  for (int n = 2; n <= 6; ++n) {
    for (int t = 0; t < 50; ++t) {
      const Matrix r = random_rotation(rng, n);
      CHECK((r.transpose() * r - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("planar sampling distributions") {
  // One obstacle always fits, so its parameters are draws from the stated laws.
  Moments cx, cy, radius, mu, angle, lambda;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const World w = gen_world_2d(config(1, seed));
    const Ellipsoid& o = w.obstacle(0);
    cx.add(o.center()[0]);
    cy.add(o.center()[1]);
    radius.add(o.radius());
    mu.add(o.mu_max());
    Vector axis = o.a().eigenvectors().col(0);
    if (axis[0] < 0) axis = -axis;
    angle.add(std::atan(axis[1] / axis[0]));
    lambda.add(w.potential().q().matrix()(1, 1));
  }
  auto within = [](const Moments& s, double expected) { return std::abs(s.mean() - expected) <= 3 * s.std_error(); };
  CHECK(within(cx, 0.0));
  CHECK(within(cy, 0.0));
  CHECK(within(radius, 3.0));
  CHECK(within(mu, 5.5));
  CHECK(within(angle, 0.0));
  CHECK(within(lambda, 10.0));
}

TEST_CASE("higher-dimensional worlds") {
  NdOptions opt;
  opt.ratio_min = 5;
  opt.ratio_max = 10;
  opt.radius_choices = {1.0, 2.0};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GenConfig g = config(6, seed, 3);
    const World w = gen_world_nd(g, opt);
    CHECK(w.dimension() == 3);
    CHECK(validate_world(w).empty());
    CHECK(in_free_space(w, gen_start(w, g)));
    for (const auto& o : w.obstacles()) {
      const double ratio = o.mu_max() / o.mu_min();
      CHECK(ratio >= 5.0 - 1e-9);
      CHECK(ratio <= 10.0 + 1e-9);
      CHECK((o.radius() == 1.0 || o.radius() == 2.0));
    }
  }
}

TEST_CASE("condition-violating mode") {
  NdOptions opt;
  opt.ratio_min = 8;
  opt.ratio_max = 10;
  opt.require_condition_violation = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const World w = gen_world_nd(config(3, seed), opt);
    CHECK_FALSE(check_condition(w).overall);
    CHECK(validate_world(w).empty());
  }
}

TEST_CASE("generation errors") {
  GenConfig g = config(2, 1);
  g.r0 = -1;
  CHECK_THROWS_AS(gen_world_2d(g), ValidationError);
  CHECK_THROWS_AS(gen_world_2d(config(2, 1, 3)), DimensionError);
  // Far too many obstacles for the workspace.
  GenConfig crowded = config(200, 1);
  crowded.max_redraws = 2000;
  CHECK_THROWS_AS(gen_world_2d(crowded), GenerationError);
  NdOptions bad;
  bad.ratio_min = 0.5;
  CHECK_THROWS_AS(gen_world_nd(config(1, 1), bad), ValidationError);
}
