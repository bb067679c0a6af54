#pragma once

#include <cmath>
#include <functional>
#include <initializer_list>

#include "navflow/navflow.hpp"

namespace navtest {

using navflow::Ellipsoid;
using navflow::Matrix;
using navflow::QuadraticPotential;
using navflow::SpdMatrix;
using navflow::Vector;
using navflow::Workspace;
using navflow::World;

inline Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

inline SpdMatrix diag(std::initializer_list<double> v) { return SpdMatrix::diagonal(vec(v)); }

inline Ellipsoid circle(double cx, double cy, double r) { return Ellipsoid(SpdMatrix::identity(2), vec({cx, cy}), r); }

inline World planar_world(std::vector<Ellipsoid> obstacles, const Vector& target, SpdMatrix q = SpdMatrix::identity(2),
                          double r0 = 20.0) {
  return World(Workspace::ball(2, r0), std::move(obstacles), QuadraticPotential(std::move(q), target));
}

// Central differences of a scalar function.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline double rel_err(const Vector& a, const Vector& b) {
  const double scale = std::max(a.stableNorm(), b.stableNorm());
  if (scale == 0.0) return 0.0;
  return (a - b).stableNorm() / scale;
}

// Uniform point of the free space, by rejection from the workspace box.
inline Vector sample_free(const World& w, navflow::Rng& rng) {
  const double r = w.workspace().r0() * std::sqrt(w.workspace().a0().inverse().maxCoeff());
  for (;;) {
    Vector x(w.dimension());
    for (int i = 0; i < w.dimension(); ++i) x[i] = w.workspace().center()[i] + rng.uniform(-r, r);
    if (navflow::in_free_space(w, x)) return x;
  }
}

}  // namespace navtest
