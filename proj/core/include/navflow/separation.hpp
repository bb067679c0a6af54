#pragma once

#include <optional>

#include "navflow/geometry.hpp"

namespace navflow {

// {y : <normal, y> = offset}
struct Hyperplane {
  Vector normal;
  double offset = 0.0;

  double signed_distance(const Vector& y) const { return normal.dot(y) - offset; }
};

// A compact convex set described by its support mapping: an ellipsoid, the
// convex hull of an ellipsoid and one extra point, or a single point.
class ConvexSet {
 public:
  static ConvexSet of(const Ellipsoid& e);
  static ConvexSet hull(const Ellipsoid& e, const Vector& extra_point);
  static ConvexSet point(const Vector& p);

  int dimension() const;
  // Any maximiser of <d, y> over the set.
  Vector support_point(const Vector& d) const;
  double support_value(const Vector& d) const;
  Vector interior_point() const;

 private:
  ConvexSet() = default;

  std::optional<Ellipsoid> ellipsoid_;
  std::optional<Vector> extra_;
};

struct SeparationResult {
  double distance = 0.0;
  Vector point_a;
  Vector point_b;
  // Perpendicular bisector of the witness pair, normal pointing from A to B.
  // Only meaningful when distance > 0.
  Hyperplane hyperplane;
  int iterations = 0;
};

inline constexpr int kMaxSeparationIterations = 10000;

// Gilbert-Johnson-Keerthi distance iteration on the Minkowski difference
// A - B. Throws NumericalError when the duality gap does not close.
SeparationResult convex_distance(const ConvexSet& a, const ConvexSet& b);

// Euclidean distance from a point to a (closed) ellipsoid; zero inside.
double point_distance(const Ellipsoid& e, const Vector& x);

}  // namespace navflow
