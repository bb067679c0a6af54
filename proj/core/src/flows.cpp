#include "navflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "navflow/errors.hpp"

namespace navflow {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

// log(f0^k + barrier), barrier >= 0.
double log_denominator(double f0, double barrier, double k) {
  const double a = f0 > 0.0 ? k * std::log(f0) : kNegInf;
  const double b = barrier > 0.0 ? std::log(barrier) : kNegInf;
  return log_sum_exp(a, b);
}

void require_k(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("k must be positive and finite");
}

void require_free(const World& w, const Vector& x, const char* what) {
  if (x.size() != w.dimension()) throw DimensionError(std::string(what) + ": dimension mismatch");
  if (!in_free_space(w, x)) throw DomainError(std::string(what) + ": point is not in free space");
}

}  // namespace

std::string to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::kNavFn: return "nav";
    case FlowKind::kSecondOrder: return "old";
    case FlowKind::kCurvatureCorrected: return "new";
  }
  return "unknown";
}

FlowKind parse_flow_kind(std::string_view name) {
  if (name == "nav" || name == "NavFn") return FlowKind::kNavFn;
  if (name == "old" || name == "SecondOrder") return FlowKind::kSecondOrder;
  if (name == "new" || name == "CurvatureCorrected") return FlowKind::kCurvatureCorrected;
  throw ValidationError("unknown flow kind '" + std::string(name) + "'");
}

void FlowParams::validate() const {
  require_k(k);
  if (!(switch_temperature > 0.0)) throw ValidationError("switch_temperature must be positive");
  if (!(ridge >= 0.0)) throw ValidationError("ridge must be non-negative");
}

double nav_potential(double f0, double barrier, double k) {
  require_k(k);
  if (barrier < 0.0) throw DomainError("nav_potential: negative barrier (outside free space)");
  if (f0 <= 0.0) return 0.0;
  if (barrier == 0.0) return 1.0;
  return std::exp(std::log(f0) - log_denominator(f0, barrier, k) / k);
}

Vector nav_gradient(double f0, const Vector& grad_f0, double barrier, const Vector& grad_barrier,
                    double k) {
  require_k(k);
  if (barrier < 0.0) throw DomainError("nav_gradient: negative barrier (outside free space)");
  // grad phi = (f0^k + B)^{-1-1/k} (B grad f0 - (f0/k) grad B)
  const double log_d = log_denominator(f0, barrier, k);
  if (log_d == kNegInf) return Vector::Zero(grad_f0.size());
  const double scale = std::exp(-(1.0 + 1.0 / k) * log_d);
  return scale * (barrier * grad_f0 - (f0 / k) * grad_barrier);
}

double nav_scaled_potential(double f0, double barrier, double k) {
  require_k(k);
  if (!(barrier > 0.0)) throw DomainError("nav_scaled_potential: barrier must be positive");
  return f0 * std::exp(-std::log(barrier) / k);
}

Vector nav_scaled_gradient(double f0, const Vector& grad_f0, double barrier,
                           const Vector& grad_barrier, double k) {
  require_k(k);
  if (!(barrier > 0.0)) throw DomainError("nav_scaled_gradient: barrier must be positive");
  const double inv_root = std::exp(-std::log(barrier) / k);
  return inv_root * (grad_f0 - (f0 / (k * barrier)) * grad_barrier);
}

double full_barrier(const World& w, const Vector& x) {
  double product = w.workspace().value(x);
  for (const auto& o : w.obstacles()) product *= o.value(x);
  return product;
}

Vector grad_full_barrier(const World& w, const Vector& x) {
  // Product rule over {0, 1, ..., m} with prefix/suffix omitted products.
  const std::size_t m = w.obstacle_count() + 1;
  std::vector<double> values(m);
  values[0] = w.workspace().value(x);
  for (std::size_t i = 1; i < m; ++i) values[i] = w.obstacles()[i - 1].value(x);
  std::vector<double> omitted(m, 1.0);
  double prefix = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    omitted[j] = prefix;
    prefix *= values[j];
  }
  double suffix = 1.0;
  for (std::size_t j = m; j-- > 0;) {
    omitted[j] *= suffix;
    suffix *= values[j];
  }
  Vector g = omitted[0] * w.workspace().gradient(x);
  for (std::size_t i = 1; i < m; ++i) g += omitted[i] * w.obstacles()[i - 1].gradient(x);
  return g;
}

double phi_k(const World& w, double k, const Vector& x) {
  if (x.size() != w.dimension()) throw DimensionError("phi_k: dimension mismatch");
  if (!in_closed_free_space(w, x)) throw DomainError("phi_k: point is outside the closed free space");
  return nav_potential(w.potential().value(x), full_barrier(w, x), k);
}

Vector grad_phi_k(const World& w, double k, const Vector& x) {
  require_free(w, x, "grad_phi_k");
  const auto& p = w.potential();
  return nav_gradient(p.value(x), p.gradient(x), full_barrier(w, x), grad_full_barrier(w, x), k);
}

double scaled_phi_k(const World& w, double k, const Vector& x) {
  require_free(w, x, "scaled_phi_k");
  return nav_scaled_potential(w.potential().value(x), full_barrier(w, x), k);
}

Vector scaled_grad_phi_k(const World& w, double k, const Vector& x) {
  require_free(w, x, "scaled_grad_phi_k");
  const auto& p = w.potential();
  return nav_scaled_gradient(p.value(x), p.gradient(x), full_barrier(w, x), grad_full_barrier(w, x),
                             k);
}

FlowTerms nav_gradient_terms(const World& w, double k, const Vector& x) {
  require_k(k);
  const auto& p = w.potential();
  return {full_barrier(w, x) * p.gradient(x), -(p.value(x) / k) * grad_full_barrier(w, x)};
}

Vector g_nav(const World& w, double k, const Vector& x) {
  return flow_terms(FlowKind::kNavFn, w, FlowParams{k}, x).total();
}

Vector g_old(const World& w, const FlowParams& params, const Vector& x) {
  return flow_terms(FlowKind::kSecondOrder, w, params, x).total();
}

Vector g_new(const World& w, double k, const Vector& x) {
  return flow_terms(FlowKind::kCurvatureCorrected, w, FlowParams{k}, x).total();
}

Vector eval_flow(FlowKind kind, const World& w, const FlowParams& params, const Vector& x) {
  return flow_terms(kind, w, params, x).total();
}

std::vector<double> soft_switch(const World& w, const FlowParams& params, const Vector& x) {
  std::vector<double> alpha(w.obstacle_count());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    alpha[i] = std::exp(-std::max(w.obstacles()[i].value(x), 0.0) / params.switch_temperature);
  }
  return alpha;
}

Matrix correction_matrix(const World& w, const FlowParams& params, const Vector& x) {
  const int n = w.dimension();
  const std::vector<double> alpha = soft_switch(w, params, x);
  Matrix b = Matrix::Zero(n, n);
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    b += alpha[i] * w.obstacles()[i].hessian();
    total += alpha[i];
  }
  b.diagonal().array() += std::max(0.0, 1.0 - total) + params.ridge;
  return b;
}

FlowTerms flow_terms(FlowKind kind, const World& w, const FlowParams& params, const Vector& x) {
  params.validate();
  if (x.size() != w.dimension()) throw DimensionError("flow: dimension mismatch");
  const auto& p = w.potential();
  const double f0 = p.value(x);
  const double k = params.k;
  const BarrierTerms t = barrier_terms(w, x);
  const std::size_t m = w.obstacle_count();

  FlowTerms out;
  switch (kind) {
    case FlowKind::kNavFn: {
      out.attractive = -t.product * p.gradient(x);
      Vector grad_b = Vector::Zero(w.dimension());
      for (std::size_t i = 0; i < m; ++i) grad_b += t.omitted[i] * w.obstacles()[i].gradient(x);
      out.repulsive = (f0 / k) * grad_b;
      break;
    }
    case FlowKind::kSecondOrder: {
      out.attractive = -t.product * (x - p.target());
      Vector grad_b = Vector::Zero(w.dimension());
      for (std::size_t i = 0; i < m; ++i) grad_b += t.omitted[i] * w.obstacles()[i].gradient(x);
      const Eigen::LDLT<Matrix> ldlt(correction_matrix(w, params, x));
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
          ldlt.vectorD().minCoeff() <= std::numeric_limits<double>::epsilon() * ldlt.vectorD().maxCoeff()) {
        throw NumericalError("g_old: correction matrix B(x) is numerically singular");
      }
      out.repulsive = (f0 / k) * ldlt.solve(grad_b);
      break;
    }
    case FlowKind::kCurvatureCorrected: {
      out.attractive = -t.product * (x - p.target());
      Vector sum = Vector::Zero(w.dimension());
      for (std::size_t i = 0; i < m; ++i) sum += t.omitted[i] * (x - w.obstacles()[i].center());
      out.repulsive = (f0 / k) * sum;
      break;
    }
  }
  return out;
}

}  // namespace navflow
