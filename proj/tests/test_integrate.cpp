#include <doctest.h>

#include "support.hpp"

using namespace navflow;
using navtest::circle;
using navtest::diag;
using navtest::vec;

namespace {

// A thin wall-like obstacle between the start region and the target.
World flat_wall() { return navtest::planar_world({Ellipsoid(diag({50, 1}), vec({5, 0}), 4.0)}, vec({0, 0})); }

World sphere_world(std::uint64_t seed, std::size_t m) {
  GenConfig g;
  g.m = m;
  g.seed = seed;
  return gen_sphere_world(g);
}

void check_trajectory_invariants(const World& w, const SimConfig& cfg, const Trajectory& t) {
  REQUIRE_FALSE(t.states.empty());
  for (std::size_t s = 0; s < t.accepted_count(); ++s) CHECK(in_free_space(w, t.states[s]));
  for (std::size_t s = 1; s < t.states.size(); ++s) {
    CHECK((t.states[s] - t.states[s - 1]).norm() <= cfg.eta * (1 + 1e-12));
  }
  if (t.status == Status::kSuccess) CHECK((t.states.back() - w.target()).norm() < cfg.eta);
  if (t.status == Status::kCollision) CHECK_FALSE(in_free_space(w, t.states.back()));
  CHECK(t.steps + 1 == t.states.size());
}

}  // namespace

TEST_CASE("normalized step") {
  const Vector x = vec({1, 2});
  CHECK(normalized_step(x, Vector::Zero(2), 0.01, 1e-4) == x);
  const Vector big = vec({3e4, -4e4});
  const double len = (normalized_step(x, big, 0.01, 1e-4) - x).norm();
  CHECK(std::abs(len - 0.01) <= 0.01 * 1e-4 / big.norm() * 1.0001);
  const Vector small = vec({0.6e-4, 0.8e-4});  // |g| = eps
  CHECK((normalized_step(x, small, 0.01, 1e-4) - x).norm() == doctest::Approx(0.005).epsilon(1e-14));
  CHECK_THROWS_AS(normalized_step(x, vec({1, 2, 3}), 0.01, 1e-4), DimensionError);
}

TEST_CASE("configuration validation") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.eta = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SimConfig{};
  c.max_steps = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SimConfig{};
  c.flow = Dynamics::kSwitchedNavFn;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.sensor_range_c = 1.0;
  CHECK_NOTHROW(c.validate());
  for (Dynamics d : {Dynamics::kNavFn, Dynamics::kSecondOrder, Dynamics::kCurvatureCorrected, Dynamics::kGradientNavFn,
                     Dynamics::kSwitchedNavFn}) {
    CHECK(parse_dynamics(to_string(d)) == d);
  }
  for (Status s : {Status::kSuccess, Status::kCollision, Status::kTimeout, Status::kLocalMinimum}) {
    CHECK(parse_status(to_string(s)) == s);
  }
}

TEST_CASE("start at the target succeeds immediately") {
  const World w = flat_wall();
  const Trajectory t = run(w, SimConfig{}, w.target());
  CHECK(t.status == Status::kSuccess);
  CHECK(t.steps == 0);
  CHECK(t.states.size() == 1);
}

TEST_CASE("infeasible start is rejected") {
  const World w = flat_wall();
  CHECK_THROWS_AS(run(w, SimConfig{}, vec({5, 0})), ValidationError);
  CHECK_THROWS_AS(run(w, SimConfig{}, vec({25, 0})), ValidationError);
  CHECK_THROWS_AS(run(w, SimConfig{}, vec({1, 2, 3})), DimensionError);
}

TEST_CASE("sphere world runs succeed") {
  const World w = sphere_world(5, 3);
  GenConfig g;
  g.seed = 5;
  const Vector x0 = gen_start(w, g);
  for (Dynamics d : {Dynamics::kNavFn, Dynamics::kSecondOrder, Dynamics::kCurvatureCorrected, Dynamics::kGradientNavFn}) {
    SimConfig cfg;
    cfg.flow = d;
    cfg.k = 20;
    const Trajectory t = run(w, cfg, x0);
    CHECK(t.status == Status::kSuccess);
    check_trajectory_invariants(w, cfg, t);
  }
}

TEST_CASE("navigation flow stalls behind a flat obstacle") {
  const World w = flat_wall();
  CHECK_FALSE(check_condition(w).overall);
  SimConfig cfg;
  cfg.flow = Dynamics::kNavFn;
  cfg.k = 15;
  const Trajectory t = run(w, cfg, vec({12, 0.3}));
  CHECK((t.status == Status::kLocalMinimum || t.status == Status::kTimeout));
  check_trajectory_invariants(w, cfg, t);
  CHECK(t.states.back()[0] > 5.0);

  // Refine the endpoint with the exact navigation gradient and shrinking steps.
  SimConfig refine;
  refine.flow = Dynamics::kGradientNavFn;
  refine.k = cfg.k;
  refine.stuck_window = 1u << 30;
  refine.max_steps = 400;
  Vector x = t.states.back();
  for (double eta = 1e-2; eta >= 1e-10; eta *= 0.1) {
    refine.eta = eta;
    refine.epsilon_norm = 1e-300;
    x = run(w, refine, x).states.back();
  }
  CHECK(stuck_detector(w, cfg.k, x));
  CHECK_FALSE(stuck_detector(w, cfg.k, w.target()));
  CHECK_FALSE(stuck_detector(w, cfg.k, vec({-6, 7})));

  cfg.flow = Dynamics::kCurvatureCorrected;
  const Trajectory fixed = run(w, cfg, vec({12, 0.3}));
  CHECK(fixed.status == Status::kSuccess);
  check_trajectory_invariants(w, cfg, fixed);
}

TEST_CASE("runs are deterministic and respect their invariants") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    GenConfig g;
    g.m = 4;
    g.seed = seed;
    const World w = gen_world_2d(g);
    const Vector x0 = gen_start(w, g);
    for (Dynamics d : {Dynamics::kNavFn, Dynamics::kSecondOrder, Dynamics::kCurvatureCorrected}) {
      SimConfig cfg;
      cfg.flow = d;
      cfg.k = 40;
      cfg.max_steps = 8000;
      const Trajectory a = run(w, cfg, x0);
      const Trajectory b = run(w, cfg, x0);
      CHECK(a.status == b.status);
      REQUIRE(a.states.size() == b.states.size());
      for (std::size_t s = 0; s < a.states.size(); ++s) CHECK(a.states[s] == b.states[s]);
      check_trajectory_invariants(w, cfg, a);
    }
  }
}

TEST_CASE("diagnostics: one row per state") {
  const World w = sphere_world(9, 2);
  SimConfig cfg;
  cfg.record_diagnostics = true;
  const Trajectory t = run(w, cfg, vec({-15, 9}));
  CHECK(t.diagnostics.size() == t.states.size());
  CHECK(t.diagnostics.front().lyapunov == doctest::Approx(0.5 * (vec({-15, 9}) - w.target()).squaredNorm()));
  CHECK(t.diagnostics.front().phi == doctest::Approx(phi_k(w, cfg.k, vec({-15, 9}))));
  CHECK(t.min_beta_seen > 0.0);
}

TEST_CASE("switched runs with full discovery match the navigation gradient run") {
  const World w = sphere_world(13, 4);
  GenConfig g;
  g.seed = 13;
  const Vector x0 = gen_start(w, g);
  SimConfig full;
  full.flow = Dynamics::kGradientNavFn;
  SimConfig sw = full;
  sw.flow = Dynamics::kSwitchedNavFn;
  sw.sensor_range_c = 1e6;
  const Trajectory a = run(w, full, x0);
  const Trajectory b = run(w, sw, x0);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t s = 0; s < a.states.size(); ++s) CHECK((a.states[s] - b.states[s]).norm() <= 1e-12);
  CHECK(b.discovery_log.size() == w.obstacle_count());
}

TEST_CASE("switched runs discover obstacles on the way and stay safe") {
  const World w = sphere_world(17, 5);
  GenConfig g;
  g.seed = 17;
  const Vector x0 = gen_start(w, g);
  SimConfig cfg;
  cfg.flow = Dynamics::kSwitchedNavFn;
  cfg.sensor_range_c = 1.0;
  const Trajectory t = run(w, cfg, x0);
  check_trajectory_invariants(w, cfg, t);
  for (std::size_t s = 1; s < t.discovery_log.size(); ++s) {
    CHECK(t.discovery_log[s - 1].step <= t.discovery_log[s].step);
  }
  cfg.eta = 1.0;
  CHECK_THROWS_AS(run(w, cfg, x0), ValidationError);
}

TEST_CASE("second-order runs") {
  const World w = sphere_world(21, 3);
  SimConfig cfg;
  const Trajectory at = run_second_order(w, cfg, w.target(), Vector::Zero(2), 1.0);
  CHECK(at.status == Status::kSuccess);
  CHECK(at.steps == 0);

  GenConfig g;
  g.seed = 21;
  const Vector x0 = gen_start(w, g);
  const Trajectory second = run_second_order(w, cfg, x0, Vector::Zero(2), 4.0);
  CHECK(second.status == Status::kSuccess);
  for (std::size_t s = 0; s < second.accepted_count(); ++s) CHECK(in_free_space(w, second.states[s]));
  CHECK(second.velocities.size() == second.states.size());
  // Energy is non-increasing (no switches with full knowledge).
  for (std::size_t s = 1; s < second.energies.size(); ++s) {
    CHECK(second.energies[s] <= second.energies[s - 1] + 1e-6);
  }
  cfg.flow = Dynamics::kGradientNavFn;
  const Trajectory first = run(w, cfg, x0);
  REQUIRE(first.status == Status::kSuccess);
  CHECK((first.states.back() - second.states.back()).norm() <= 10 * cfg.eta);

  CHECK_THROWS_AS(run_second_order(w, cfg, x0, Vector::Zero(2), 0.0), ValidationError);
}
