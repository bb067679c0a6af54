#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace navflow;

namespace {

World shipped(const char* name) { return load_world(std::string(NAVFLOW_DATA_DIR) + "/worlds/" + name); }

}  // namespace

TEST_CASE("planar example world") {
  const World w = shipped("planar_eight_obstacles.json");
  CHECK(w.obstacle_count() == 8);
  CHECK(validate_world(w).empty());
  CHECK_FALSE(check_condition(w).overall);

  int nav_stuck = 0, new_ok = 0;
  for (int a = 0; a < 12; ++a) {
    const double th = a * std::numbers::pi / 6;
    const Vector x0 = navtest::vec({15 * std::cos(th), 15 * std::sin(th)});
    REQUIRE(in_free_space(w, x0));
    SimConfig cfg;
    cfg.k = 15;
    cfg.flow = Dynamics::kNavFn;
    nav_stuck += run(w, cfg, x0).status == Status::kLocalMinimum;
    cfg.flow = Dynamics::kCurvatureCorrected;
    new_ok += run(w, cfg, x0).status == Status::kSuccess;
  }
  CHECK(nav_stuck == 7);
  CHECK(new_ok == 12);
}

TEST_CASE("spatial example world") {
  const World w = shipped("spatial_six_obstacles.json");
  CHECK(w.dimension() == 3);
  CHECK(validate_world(w).empty());
  for (const auto& o : w.obstacles()) {
    CHECK(o.mu_max() / o.mu_min() >= 5.0 - 1e-9);
    CHECK(o.mu_max() / o.mu_min() <= 10.0 + 1e-9);
    CHECK((o.radius() == 1.0 || o.radius() == 2.0));
  }
  const Vector x0 = navtest::vec({0.2, 0.1, 13});
  SimConfig cfg;
  cfg.k = 40;
  cfg.flow = Dynamics::kNavFn;
  CHECK(run(w, cfg, x0).status == Status::kLocalMinimum);
  cfg.flow = Dynamics::kSecondOrder;
  CHECK(run(w, cfg, x0).status == Status::kSuccess);
  cfg.flow = Dynamics::kCurvatureCorrected;
  CHECK(run(w, cfg, x0).status == Status::kSuccess);
}
