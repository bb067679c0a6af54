#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace navflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kSeparationTolerance = 1e-9;

// Symmetric positive definite matrix. The spectral decomposition and the
// inverse are computed once at construction; every accessor is const.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m);
  static SpdMatrix identity(int n);
  static SpdMatrix diagonal(const Vector& eigenvalues);
  static SpdMatrix from_spectrum(const Matrix& rotation, const Vector& eigenvalues);

  const Matrix& matrix() const { return m_; }
  const Matrix& inverse() const { return inverse_; }
  int dimension() const { return static_cast<int>(m_.rows()); }

  // Ascending eigenvalues; columns of eigenvectors() match.
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  double min_eigenvalue() const { return eigenvalues_(0); }
  double max_eigenvalue() const { return eigenvalues_(eigenvalues_.size() - 1); }

  // x^T M x
  double quadratic_form(const Vector& x) const { return x.dot(m_ * x); }

 private:
  Matrix m_;
  Matrix inverse_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

// f0(x) = (x - x*)^T Q (x - x*). No 1/2 factor.
class QuadraticPotential {
 public:
  QuadraticPotential(SpdMatrix q, Vector target);

  const SpdMatrix& q() const { return q_; }
  const Vector& target() const { return target_; }
  int dimension() const { return q_.dimension(); }
  double lambda_min() const { return q_.min_eigenvalue(); }
  double lambda_max() const { return q_.max_eigenvalue(); }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;  // 2 Q (x - x*)
  Matrix hessian() const;                  // 2 Q

 private:
  SpdMatrix q_;
  Vector target_;
};

// beta_i(x) = 1/2 (x - x_i)^T A_i (x - x_i) - 1/2 r_i^2; the obstacle is the
// closed sublevel set beta_i <= 0.
class Ellipsoid {
 public:
  Ellipsoid(SpdMatrix a, Vector center, double radius);

  const SpdMatrix& a() const { return a_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  int dimension() const { return a_.dimension(); }
  double mu_min() const { return a_.min_eigenvalue(); }
  double mu_max() const { return a_.max_eigenvalue(); }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  const Matrix& hessian() const { return a_.matrix(); }

  // Semiaxis lengths r / sqrt(mu_k), ordered like a().eigenvalues().
  Vector semi_axes() const;
  // h(d) = <d, x_i> + r sqrt(d^T A^{-1} d)
  double support_value(const Vector& d) const;
  Vector support_point(const Vector& d) const;

 private:
  SpdMatrix a_;
  Vector center_;
  double radius_;
};

// beta_0(x) = 1/2 (r0^2 - (x - c)^T A0 (x - c)); the workspace is beta_0 >= 0.
class Workspace {
 public:
  Workspace(SpdMatrix a0, Vector center, double r0);
  static Workspace ball(int dimension, double r0);

  const SpdMatrix& a0() const { return a0_; }
  const Vector& center() const { return center_; }
  double r0() const { return r0_; }
  int dimension() const { return a0_.dimension(); }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  // Largest Euclidean distance between two workspace points.
  double diameter() const;

 private:
  SpdMatrix a0_;
  Vector center_;
  double r0_;
};

class World {
 public:
  World(Workspace workspace, std::vector<Ellipsoid> obstacles, QuadraticPotential potential);

  const Workspace& workspace() const { return workspace_; }
  const std::vector<Ellipsoid>& obstacles() const { return obstacles_; }
  const Ellipsoid& obstacle(std::size_t i) const;
  std::size_t obstacle_count() const { return obstacles_.size(); }
  const QuadraticPotential& potential() const { return potential_; }
  const Vector& target() const { return potential_.target(); }
  int dimension() const { return workspace_.dimension(); }

 private:
  Workspace workspace_;
  std::vector<Ellipsoid> obstacles_;
  QuadraticPotential potential_;
};

// Per-obstacle values at one point together with the omitted products
// bar_beta_i = prod_{j != i} beta_j, built from prefix/suffix products so a
// zero factor never leaks into its own omitted product.
struct BarrierTerms {
  std::vector<double> values;
  std::vector<double> omitted;
  double product = 1.0;
};

BarrierTerms barrier_terms(const World& w, const Vector& x);

double eval_f0(const QuadraticPotential& p, const Vector& x);
double eval_beta_i(const Ellipsoid& e, const Vector& x);
Vector grad_beta_i(const Ellipsoid& e, const Vector& x);
const Matrix& hess_beta_i(const Ellipsoid& e);
double eval_beta0(const World& w, const Vector& x);
double eval_beta(const World& w, const Vector& x);
// Product rule: sum_i bar_beta_i(x) grad beta_i(x).
Vector grad_beta(const World& w, const Vector& x);
double bar_beta(const World& w, const Vector& x, std::size_t i);
bool in_free_space(const World& w, const Vector& x);
// Closed free space: beta_0 >= 0 and every beta_i >= 0.
bool in_closed_free_space(const World& w, const Vector& x);
// min(beta_0(x), min_i beta_i(x)); positive exactly on the open free space.
double min_barrier(const World& w, const Vector& x);

// max over y in the obstacle of (y - c)^T A0 (y - c), compared against r0^2
// by validate_world.
double max_workspace_form(const Workspace& ws, const Ellipsoid& e);

struct WorldViolation {
  enum class Kind { kDimension, kTargetNotFree, kObstacleOverlap, kObstacleOutsideWorkspace };
  Kind kind;
  std::vector<std::size_t> indices;
  std::string message;
};

std::string to_string(WorldViolation::Kind kind);

std::vector<WorldViolation> validate_world(const World& w);

}  // namespace navflow
