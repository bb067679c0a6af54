#include "navflow/switched.hpp"

#include <cmath>
#include <limits>

#include "navflow/errors.hpp"

namespace navflow {

AwarenessState::AwarenessState(double sensor_range_c) : c_(sensor_range_c) {
  if (!(c_ > 0.0)) throw ValidationError("sensor range c must be positive");
}

AwarenessState AwarenessState::omniscient(const World& w) {
  AwarenessState s(std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
    s.discovered_.insert(i);
    s.log_.push_back({0, i});
  }
  return s;
}

AwarenessState update_awareness(const AwarenessState& s, const World& w, const Vector& x) {
  if (x.size() != w.dimension()) throw DimensionError("update_awareness: dimension mismatch");
  AwarenessState next = s;
  for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
    if (next.knows(i)) continue;
    if (w.obstacles()[i].value(x) <= s.c_) {
      next.discovered_.insert(i);
      next.log_.push_back({s.step_, i});
    }
  }
  return next;
}

double partial_beta(const World& w, const AwarenessState& s, const Vector& x) {
  double product = w.workspace().value(x);
  for (std::size_t i : s.discovered()) product *= w.obstacle(i).value(x);
  return product;
}

Vector grad_partial_beta(const World& w, const AwarenessState& s, const Vector& x) {
  // Product rule over {0} U discovered with prefix/suffix omitted products.
  std::vector<double> values{w.workspace().value(x)};
  std::vector<Vector> grads{w.workspace().gradient(x)};
  for (std::size_t i : s.discovered()) {
    values.push_back(w.obstacle(i).value(x));
    grads.push_back(w.obstacle(i).gradient(x));
  }
  const std::size_t m = values.size();
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
  Vector g = Vector::Zero(w.dimension());
  for (std::size_t j = 0; j < m; ++j) g += omitted[j] * grads[j];
  return g;
}

bool in_partial_free_space(const World& w, const AwarenessState& s, const Vector& x) {
  if (!x.allFinite() || !(w.workspace().value(x) > 0.0)) return false;
  for (std::size_t i : s.discovered()) {
    if (!(w.obstacle(i).value(x) > 0.0)) return false;
  }
  return true;
}

namespace {

void require_partial_free(const World& w, const AwarenessState& s, const Vector& x, const char* what) {
  if (x.size() != w.dimension()) throw DimensionError(std::string(what) + ": dimension mismatch");
  if (!in_partial_free_space(w, s, x)) {
    throw DomainError(std::string(what) + ": point is outside the partial free space");
  }
}

}  // namespace

double partial_phi_k(const World& w, const AwarenessState& s, double k, const Vector& x) {
  require_partial_free(w, s, x, "partial_phi_k");
  return nav_potential(w.potential().value(x), partial_beta(w, s, x), k);
}

Vector partial_grad(const World& w, const AwarenessState& s, double k, const Vector& x) {
  require_partial_free(w, s, x, "partial_grad");
  const auto& p = w.potential();
  return nav_gradient(p.value(x), p.gradient(x), partial_beta(w, s, x), grad_partial_beta(w, s, x), k);
}

double partial_scaled_phi_k(const World& w, const AwarenessState& s, double k, const Vector& x) {
  require_partial_free(w, s, x, "partial_scaled_phi_k");
  return nav_scaled_potential(w.potential().value(x), partial_beta(w, s, x), k);
}

Vector partial_scaled_grad(const World& w, const AwarenessState& s, double k, const Vector& x) {
  require_partial_free(w, s, x, "partial_scaled_grad");
  const auto& p = w.potential();
  return nav_scaled_gradient(p.value(x), p.gradient(x), partial_beta(w, s, x),
                             grad_partial_beta(w, s, x), k);
}

FlowTerms partial_gradient_terms(const World& w, const AwarenessState& s, double k, const Vector& x) {
  const auto& p = w.potential();
  return {partial_beta(w, s, x) * p.gradient(x), -(p.value(x) / k) * grad_partial_beta(w, s, x)};
}

std::pair<Vector, AwarenessState> switched_step_field(const World& w, const AwarenessState& s, double k,
                                                      const Vector& x, GradientScale scale) {
  Vector field = scale == GradientScale::kExact ? Vector(-partial_grad(w, s, k, x))
                                                : Vector(-partial_scaled_grad(w, s, k, x));
  return {std::move(field), update_awareness(s, w, x)};
}

Vector dissipative_field(const Vector& v, double damping_gain) { return -damping_gain * v; }

Vector torque_controller(const World& w, const AwarenessState& s, double k, const Vector& x,
                         const Vector& v, double damping_gain, GradientScale scale) {
  if (!(damping_gain > 0.0)) throw ValidationError("damping gain must be positive");
  if (v.size() != x.size()) throw DimensionError("torque_controller: velocity dimension mismatch");
  const Vector grad = scale == GradientScale::kExact ? partial_grad(w, s, k, x)
                                                      : partial_scaled_grad(w, s, k, x);
  return -grad + dissipative_field(v, damping_gain);
}

double max_safe_step(const World& w, double sensor_range_c) {
  double norm = 0.0;
  for (const auto& o : w.obstacles()) norm = std::max(norm, o.a().max_eigenvalue());
  if (norm == 0.0) return std::numeric_limits<double>::infinity();
  return sensor_range_c / (2.0 * norm * w.workspace().diameter());
}

}  // namespace navflow
