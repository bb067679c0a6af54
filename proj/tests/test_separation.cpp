#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "support.hpp"

using namespace navflow;
using navtest::circle;
using navtest::diag;
using navtest::vec;

TEST_CASE("distance between unit circles") {
  const auto r = convex_distance(ConvexSet::of(circle(0, 0, 1)), ConvexSet::of(circle(4, 0, 1)));
  CHECK(r.distance == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(r.hyperplane.normal.normalized().dot(vec({1, 0}))) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.hyperplane.signed_distance(vec({0, 0})) < 0.0);
  CHECK(r.hyperplane.signed_distance(vec({4, 0})) > 0.0);
  CHECK((r.point_a - r.point_b).norm() == doctest::Approx(r.distance));
}

TEST_CASE("intersecting sets are at distance zero") {
  const auto r = convex_distance(ConvexSet::of(circle(0, 0, 1)), ConvexSet::of(circle(1, 0, 1)));
  CHECK(r.distance == 0.0);
  const auto h = convex_distance(ConvexSet::hull(circle(5, 0, 1), vec({-5, 0})), ConvexSet::of(circle(0, 0.5, 1)));
  CHECK(h.distance == 0.0);
}

TEST_CASE("hull with a point and point sets") {
  const auto r = convex_distance(ConvexSet::point(vec({0, 3})), ConvexSet::hull(circle(5, 0, 1), vec({-5, 0})));
  // Nearest hull edge is the tangent from (-5, 0) at angle asin(0.1).
  const double th = std::asin(0.1);
  CHECK(r.distance == doctest::Approx(std::abs(5 * std::sin(th) - 3 * std::cos(th))).epsilon(1e-9));
  CHECK(point_distance(circle(0, 0, 1), vec({3, 4})) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(point_distance(circle(0, 0, 1), vec({0.5, 0})) == 0.0);
}

TEST_CASE("random ellipsoid pairs agree with the polar-grid oracle") {
  Rng rng(2024);
  int separated = 0;
  for (int t = 0; t < 200; ++t) {
    auto draw = [&] {
      const double th = rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
      Matrix rot(2, 2);
      rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      return Ellipsoid(SpdMatrix::from_spectrum(rot, vec({1.0, rng.uniform(1, 10)})),
                       vec({rng.uniform(-8, 8), rng.uniform(-8, 8)}), rng.uniform(1, 4));
    };
    const Ellipsoid a = draw(), b = draw();
    const auto r = convex_distance(ConvexSet::of(a), ConvexSet::of(b));
    const double oracle = navtest::polar_grid_distance(ConvexSet::of(a), ConvexSet::of(b));
    CHECK(std::abs(r.distance - oracle) < 1e-4);
    if (r.distance > 0.0) {
      ++separated;
      CHECK(eval_beta_i(a, r.point_a) == doctest::Approx(0.0).epsilon(1e-7));
      CHECK(eval_beta_i(b, r.point_b) == doctest::Approx(0.0).epsilon(1e-7));
      // The bisector strictly separates.
      CHECK(a.support_value(r.hyperplane.normal) < r.hyperplane.offset);
      CHECK(-b.support_value(-r.hyperplane.normal) > r.hyperplane.offset);
    }
  }
  CHECK(separated > 50);
}

TEST_CASE("three-dimensional distance") {
  const Ellipsoid a(SpdMatrix::identity(3), vec({0, 0, 0}), 1.0);
  const Ellipsoid b(diag({1, 1, 4}), vec({0, 0, 5}), 2.0);
  const auto r = convex_distance(ConvexSet::of(a), ConvexSet::of(b));
  CHECK(r.distance == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_THROWS_AS(convex_distance(ConvexSet::of(a), ConvexSet::of(circle(0, 0, 1))), DimensionError);
}
