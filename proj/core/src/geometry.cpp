#include "navflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "navflow/errors.hpp"
#include "navflow/separation.hpp"

namespace navflow {
namespace {

void require_dimension(int expected, Eigen::Index actual, const char* what) {
  if (actual != expected) {
    std::ostringstream os;
    os << what << ": expected dimension " << expected << ", got " << actual;
    throw DimensionError(os.str());
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

}  // namespace

// --- SpdMatrix ---------------------------------------------------------------

SpdMatrix::SpdMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError("SpdMatrix: matrix must be square and non-empty");
  }
  if (!m.allFinite()) throw ValidationError("SpdMatrix: non-finite entry");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw ValidationError("SpdMatrix: matrix is not symmetric");
  }
  m_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m_);
  if (solver.info() != Eigen::Success) throw NumericalError("SpdMatrix: eigensolver failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  if (!(eigenvalues_(0) > 0.0)) throw ValidationError("SpdMatrix: matrix is not positive definite");
  inverse_ = eigenvectors_ * eigenvalues_.cwiseInverse().asDiagonal() * eigenvectors_.transpose();
}

SpdMatrix SpdMatrix::identity(int n) { return SpdMatrix(Matrix::Identity(n, n)); }

SpdMatrix SpdMatrix::diagonal(const Vector& eigenvalues) {
  return SpdMatrix(Matrix(eigenvalues.asDiagonal()));
}

SpdMatrix SpdMatrix::from_spectrum(const Matrix& rotation, const Vector& eigenvalues) {
  Matrix m = rotation * eigenvalues.asDiagonal() * rotation.transpose();
  return SpdMatrix(Matrix(0.5 * (m + m.transpose())));
}

// --- QuadraticPotential ------------------------------------------------------

QuadraticPotential::QuadraticPotential(SpdMatrix q, Vector target)
    : q_(std::move(q)), target_(std::move(target)) {
  require_dimension(q_.dimension(), target_.size(), "QuadraticPotential target");
  require_finite(target_, "QuadraticPotential target");
}

double QuadraticPotential::value(const Vector& x) const {
  require_dimension(dimension(), x.size(), "eval_f0");
  return q_.quadratic_form(x - target_);
}

Vector QuadraticPotential::gradient(const Vector& x) const {
  require_dimension(dimension(), x.size(), "grad_f0");
  return 2.0 * (q_.matrix() * (x - target_));
}

Matrix QuadraticPotential::hessian() const { return 2.0 * q_.matrix(); }

// --- Ellipsoid ---------------------------------------------------------------

Ellipsoid::Ellipsoid(SpdMatrix a, Vector center, double radius)
    : a_(std::move(a)), center_(std::move(center)), radius_(radius) {
  require_dimension(a_.dimension(), center_.size(), "Ellipsoid center");
  require_finite(center_, "Ellipsoid center");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw ValidationError("Ellipsoid: radius must be positive and finite");
  }
}

double Ellipsoid::value(const Vector& x) const {
  require_dimension(dimension(), x.size(), "eval_beta_i");
  return 0.5 * a_.quadratic_form(x - center_) - 0.5 * radius_ * radius_;
}

Vector Ellipsoid::gradient(const Vector& x) const {
  require_dimension(dimension(), x.size(), "grad_beta_i");
  return a_.matrix() * (x - center_);
}

Vector Ellipsoid::semi_axes() const { return radius_ * a_.eigenvalues().cwiseSqrt().cwiseInverse(); }

double Ellipsoid::support_value(const Vector& d) const {
  return d.dot(center_) + radius_ * std::sqrt(std::max(0.0, d.dot(a_.inverse() * d)));
}

Vector Ellipsoid::support_point(const Vector& d) const {
  const Vector ad = a_.inverse() * d;
  const double n = std::sqrt(std::max(0.0, d.dot(ad)));
  if (n == 0.0) return center_;
  return center_ + (radius_ / n) * ad;
}

// --- Workspace ---------------------------------------------------------------

Workspace::Workspace(SpdMatrix a0, Vector center, double r0)
    : a0_(std::move(a0)), center_(std::move(center)), r0_(r0) {
  require_dimension(a0_.dimension(), center_.size(), "Workspace center");
  require_finite(center_, "Workspace center");
  if (!(r0_ > 0.0) || !std::isfinite(r0_)) throw ValidationError("Workspace: r0 must be positive");
}

Workspace Workspace::ball(int dimension, double r0) {
  return Workspace(SpdMatrix::identity(dimension), Vector::Zero(dimension), r0);
}

double Workspace::value(const Vector& x) const {
  require_dimension(dimension(), x.size(), "eval_beta0");
  return 0.5 * (r0_ * r0_ - a0_.quadratic_form(x - center_));
}

Vector Workspace::gradient(const Vector& x) const {
  require_dimension(dimension(), x.size(), "grad_beta0");
  return -(a0_.matrix() * (x - center_));
}

double Workspace::diameter() const { return 2.0 * r0_ / std::sqrt(a0_.min_eigenvalue()); }

// --- World -------------------------------------------------------------------

World::World(Workspace workspace, std::vector<Ellipsoid> obstacles, QuadraticPotential potential)
    : workspace_(std::move(workspace)),
      obstacles_(std::move(obstacles)),
      potential_(std::move(potential)) {
  const int n = workspace_.dimension();
  if (n < 2) throw DimensionError("World: dimension must be at least 2");
  require_dimension(n, potential_.dimension(), "World potential");
  for (const auto& o : obstacles_) require_dimension(n, o.dimension(), "World obstacle");
}

const Ellipsoid& World::obstacle(std::size_t i) const {
  if (i >= obstacles_.size()) {
    throw std::out_of_range("obstacle index " + std::to_string(i) + " out of range");
  }
  return obstacles_[i];
}

// --- Evaluation --------------------------------------------------------------

BarrierTerms barrier_terms(const World& w, const Vector& x) {
  require_dimension(w.dimension(), x.size(), "barrier_terms");
  const std::size_t m = w.obstacle_count();
  BarrierTerms t;
  t.values.resize(m);
  t.omitted.assign(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) t.values[i] = w.obstacles()[i].value(x);
  double prefix = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    t.omitted[i] = prefix;
    prefix *= t.values[i];
  }
  double suffix = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    t.omitted[i] *= suffix;
    suffix *= t.values[i];
  }
  t.product = prefix;
  return t;
}

double eval_f0(const QuadraticPotential& p, const Vector& x) { return p.value(x); }
double eval_beta_i(const Ellipsoid& e, const Vector& x) { return e.value(x); }
Vector grad_beta_i(const Ellipsoid& e, const Vector& x) { return e.gradient(x); }
const Matrix& hess_beta_i(const Ellipsoid& e) { return e.hessian(); }
double eval_beta0(const World& w, const Vector& x) { return w.workspace().value(x); }

double eval_beta(const World& w, const Vector& x) {
  require_dimension(w.dimension(), x.size(), "eval_beta");
  double product = 1.0;
  for (const auto& o : w.obstacles()) product *= o.value(x);
  return product;
}

Vector grad_beta(const World& w, const Vector& x) {
  const BarrierTerms t = barrier_terms(w, x);
  Vector g = Vector::Zero(w.dimension());
  for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
    g += t.omitted[i] * w.obstacles()[i].gradient(x);
  }
  return g;
}

double bar_beta(const World& w, const Vector& x, std::size_t i) {
  if (i >= w.obstacle_count()) {
    throw std::out_of_range("bar_beta: obstacle index " + std::to_string(i) + " out of range");
  }
  return barrier_terms(w, x).omitted[i];
}

double min_barrier(const World& w, const Vector& x) {
  double lowest = w.workspace().value(x);
  for (const auto& o : w.obstacles()) lowest = std::min(lowest, o.value(x));
  return lowest;
}

bool in_free_space(const World& w, const Vector& x) {
  if (!x.allFinite()) return false;
  const double b0 = w.workspace().value(x);
  if (!(b0 > 0.0)) return false;
  double product = 1.0;
  for (const auto& o : w.obstacles()) {
    const double b = o.value(x);
    if (!(b > 0.0)) return false;
    product *= b;
  }
  return b0 * product > 0.0;
}

bool in_closed_free_space(const World& w, const Vector& x) {
  return x.allFinite() && min_barrier(w, x) >= 0.0;
}

double max_workspace_form(const Workspace& ws, const Ellipsoid& e) {
  // y = x_i + r S u with S = A^{-1/2}, |u| <= 1; maximise |b + G u|^2 with
  // b = R (x_i - c), G = r R S, R = A0^{1/2}. The maximum of a convex
  // quadratic over the ball sits on the sphere (trust-region secular equation).
  const Matrix& va = e.a().eigenvectors();
  const Matrix s = va * e.a().eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * va.transpose();
  const Matrix& v0 = ws.a0().eigenvectors();
  const Matrix root = v0 * ws.a0().eigenvalues().cwiseSqrt().asDiagonal() * v0.transpose();
  const Vector b = root * (e.center() - ws.center());
  const Matrix g_mat = e.radius() * root * s;
  const Matrix h = g_mat.transpose() * g_mat;
  const Vector g = g_mat.transpose() * b;

  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  const Vector hk = solver.eigenvalues();
  const Vector gamma = solver.eigenvectors().transpose() * g;
  const Eigen::Index n = hk.size();
  const double h_max = hk(n - 1);
  const double tiny = 1e-14 * std::max(1.0, h_max);

  auto secular = [&](double nu) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) sum += gamma(k) * gamma(k) / ((nu - hk(k)) * (nu - hk(k)));
    return sum;
  };

  Vector u(n);
  double top_weight = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (h_max - hk(k) <= tiny) top_weight += gamma(k) * gamma(k);
  }
  bool hard_case = false;
  if (top_weight <= 1e-28 * std::max(1.0, g.squaredNorm())) {
    double rest = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (h_max - hk(k) > tiny) rest += gamma(k) * gamma(k) / ((h_max - hk(k)) * (h_max - hk(k)));
    }
    if (rest <= 1.0) {
      hard_case = true;
      bool placed = false;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (h_max - hk(k) > tiny) {
          u(k) = gamma(k) / (h_max - hk(k));
        } else if (!placed) {
          u(k) = std::sqrt(1.0 - rest);
          placed = true;
        } else {
          u(k) = 0.0;
        }
      }
    }
  }
  if (!hard_case) {
    double lo = h_max;
    double hi = h_max + std::max(g.norm(), tiny);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (secular(mid) > 1.0) lo = mid; else hi = mid;
    }
    const double nu = hi;
    for (Eigen::Index k = 0; k < n; ++k) u(k) = gamma(k) / (nu - hk(k));
  }
  double value = b.squaredNorm() + 2.0 * gamma.dot(u);
  for (Eigen::Index k = 0; k < n; ++k) value += hk(k) * u(k) * u(k);
  return value;
}

std::string to_string(WorldViolation::Kind kind) {
  switch (kind) {
    case WorldViolation::Kind::kDimension: return "Dimension";
    case WorldViolation::Kind::kTargetNotFree: return "Assumption1";
    case WorldViolation::Kind::kObstacleOverlap: return "Assumption2";
    case WorldViolation::Kind::kObstacleOutsideWorkspace: return "ObstacleOutsideWorkspace";
  }
  return "Unknown";
}

std::vector<WorldViolation> validate_world(const World& w) {
  std::vector<WorldViolation> out;
  const Vector& target = w.target();
  if (!(w.workspace().value(target) > 0.0)) {
    out.push_back({WorldViolation::Kind::kTargetNotFree, {},
                   "Assumption1: target is not strictly inside the workspace"});
  }
  for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
    if (!(w.obstacles()[i].value(target) > 0.0)) {
      out.push_back({WorldViolation::Kind::kTargetNotFree, {i},
                     "Assumption1: target lies in obstacle " + std::to_string(i)});
    }
  }
  const double r0_sq = w.workspace().r0() * w.workspace().r0();
  for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
    if (!(max_workspace_form(w.workspace(), w.obstacles()[i]) < r0_sq)) {
      out.push_back({WorldViolation::Kind::kObstacleOutsideWorkspace, {i},
                     "obstacle " + std::to_string(i) + " is not strictly inside the workspace"});
    }
  }
  for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
    for (std::size_t j = i + 1; j < w.obstacle_count(); ++j) {
      const auto sep = convex_distance(ConvexSet::of(w.obstacles()[i]), ConvexSet::of(w.obstacles()[j]));
      if (!(sep.distance > kSeparationTolerance)) {
        out.push_back({WorldViolation::Kind::kObstacleOverlap, {i, j},
                       "Assumption2: obstacles " + std::to_string(i) + " and " + std::to_string(j) +
                           " intersect"});
      }
    }
  }
  return out;
}

}  // namespace navflow
