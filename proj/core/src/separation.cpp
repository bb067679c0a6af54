#include "navflow/separation.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "navflow/errors.hpp"

namespace navflow {

ConvexSet ConvexSet::of(const Ellipsoid& e) {
  ConvexSet s;
  s.ellipsoid_ = e;
  return s;
}

ConvexSet ConvexSet::hull(const Ellipsoid& e, const Vector& extra_point) {
  if (extra_point.size() != e.dimension()) throw DimensionError("ConvexSet::hull: dimension mismatch");
  ConvexSet s;
  s.ellipsoid_ = e;
  s.extra_ = extra_point;
  return s;
}

ConvexSet ConvexSet::point(const Vector& p) {
  ConvexSet s;
  s.extra_ = p;
  return s;
}

int ConvexSet::dimension() const {
  return ellipsoid_ ? ellipsoid_->dimension() : static_cast<int>(extra_->size());
}

Vector ConvexSet::support_point(const Vector& d) const {
  if (!ellipsoid_) return *extra_;
  Vector best = ellipsoid_->support_point(d);
  if (extra_ && d.dot(*extra_) > d.dot(best)) best = *extra_;
  return best;
}

double ConvexSet::support_value(const Vector& d) const { return d.dot(support_point(d)); }

Vector ConvexSet::interior_point() const { return ellipsoid_ ? ellipsoid_->center() : *extra_; }

namespace {

struct Vertex {
  Vector w;  // a - b
  Vector a;
  Vector b;
};

struct SubsetSolution {
  Vector v;
  std::vector<double> lambda;
  std::vector<std::size_t> members;
};

// Closest point of conv(simplex) to the origin, by enumerating faces and
// keeping the smallest affine minimiser with non-negative barycentric weights.
SubsetSolution closest_on_simplex(const std::vector<Vertex>& simplex) {
  const std::size_t count = simplex.size();
  SubsetSolution best;
  double best_norm = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << count); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < count; ++i) {
      if (mask & (1u << i)) members.push_back(i);
    }
    const Vector& base = simplex[members[0]].w;
    const std::size_t p = members.size() - 1;
    std::vector<double> lambda(members.size());
    Vector v;
    if (p == 0) {
      lambda[0] = 1.0;
      v = base;
    } else {
      Matrix edges(base.size(), static_cast<Eigen::Index>(p));
      for (std::size_t j = 0; j < p; ++j) edges.col(static_cast<Eigen::Index>(j)) = simplex[members[j + 1]].w - base;
      const Matrix gram = edges.transpose() * edges;
      Eigen::FullPivLU<Matrix> lu(gram);
      lu.setThreshold(1e-12);
      if (lu.rank() < static_cast<Eigen::Index>(p)) continue;
      const Vector mu = lu.solve(-(edges.transpose() * base));
      double sum = 0.0;
      bool valid = true;
      for (std::size_t j = 0; j < p; ++j) {
        lambda[j + 1] = mu(static_cast<Eigen::Index>(j));
        sum += lambda[j + 1];
        if (lambda[j + 1] < 0.0) valid = false;
      }
      lambda[0] = 1.0 - sum;
      if (lambda[0] < 0.0) valid = false;
      if (!valid) continue;
      v = base + edges * mu;
    }
    const double norm = v.norm();
    if (norm < best_norm) {
      best_norm = norm;
      best.v = v;
      best.lambda = lambda;
      best.members = members;
    }
  }
  return best;
}

}  // namespace

SeparationResult convex_distance(const ConvexSet& a, const ConvexSet& b) {
  const int n = a.dimension();
  if (b.dimension() != n) throw DimensionError("convex_distance: dimension mismatch");

  auto make_vertex = [&](const Vector& dir) {
    Vertex vx;
    vx.a = a.support_point(-dir);
    vx.b = b.support_point(dir);
    vx.w = vx.a - vx.b;
    return vx;
  };

  Vector dir = a.interior_point() - b.interior_point();
  if (dir.norm() == 0.0) dir = Vector::Unit(n, 0);
  std::vector<Vertex> simplex{make_vertex(dir)};
  Vector v = simplex[0].w;
  std::vector<double> lambda{1.0};
  const double scale = std::max({1.0, a.interior_point().norm(), b.interior_point().norm()});

  SeparationResult result;
  auto finish = [&](int iterations, bool touching) {
    Vector pa = Vector::Zero(n);
    Vector pb = Vector::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      pa += lambda[i] * simplex[i].a;
      pb += lambda[i] * simplex[i].b;
    }
    result.point_a = pa;
    result.point_b = pb;
    result.iterations = iterations;
    if (touching) {
      result.distance = 0.0;
      result.hyperplane = {Vector::Zero(n), 0.0};
      return result;
    }
    result.distance = (pa - pb).norm();
    const Vector normal = (pb - pa) / result.distance;
    result.hyperplane = {normal, normal.dot(0.5 * (pa + pb))};
    return result;
  };

  for (int it = 1; it <= kMaxSeparationIterations; ++it) {
    const double v_norm = v.norm();
    if (v_norm <= 1e-12 * scale) return finish(it, true);
    const Vertex next = make_vertex(v);
    // Lower bound on the distance from the support along -v.
    const double lower = v.dot(next.w) / v_norm;
    if (v_norm - lower <= 1e-12 * scale) return finish(it, false);

    simplex.push_back(next);
    const SubsetSolution sol = closest_on_simplex(simplex);
    if (sol.members.empty()) throw NumericalError("convex_distance: degenerate simplex");
    std::vector<Vertex> reduced;
    std::vector<double> weights;
    for (std::size_t j = 0; j < sol.members.size(); ++j) {
      if (sol.lambda[j] > 0.0 || sol.members.size() == 1) {
        reduced.push_back(simplex[sol.members[j]]);
        weights.push_back(sol.lambda[j]);
      }
    }
    const double new_norm = sol.v.norm();
    simplex = std::move(reduced);
    lambda = std::move(weights);
    if (static_cast<int>(simplex.size()) > n) return finish(it, true);
    if (new_norm >= v_norm * (1.0 - 1e-15)) {
      // No progress at machine precision: the current point is optimal.
      v = sol.v;
      return finish(it, v.norm() <= 1e-12 * scale);
    }
    v = sol.v;
  }
  throw NumericalError("convex_distance: no convergence after " +
                       std::to_string(kMaxSeparationIterations) + " iterations");
}

double point_distance(const Ellipsoid& e, const Vector& x) {
  if (e.value(x) <= 0.0) return 0.0;
  return convex_distance(ConvexSet::point(x), ConvexSet::of(e)).distance;
}

}  // namespace navflow
