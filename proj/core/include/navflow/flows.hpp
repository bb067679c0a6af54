#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "navflow/geometry.hpp"

namespace navflow {

enum class FlowKind {
  kNavFn,               // g_nav: simplified Rimon-Koditschek gradient
  kSecondOrder,         // g_old: Hessian-blended correction B(x)^{-1}
  kCurvatureCorrected,  // g_new: per-obstacle (x - x_i) correction
};

std::string to_string(FlowKind kind);
// Accepts "nav", "old", "new" and the enumerator spellings.
FlowKind parse_flow_kind(std::string_view name);

struct FlowParams {
  double k = 20.0;
  // Soft-switch scale tau in alpha_i = exp(-max(beta_i, 0) / tau).
  double switch_temperature = 0.5;
  // Added to B(x) as ridge * I.
  double ridge = 1e-8;

  void validate() const;
};

// A field split as attractive + repulsive; the repulsive part carries the
// 1/k factor and the attractive part does not depend on k.
struct FlowTerms {
  Vector attractive;
  Vector repulsive;

  Vector total() const { return attractive + repulsive; }
};

// Rimon-Koditschek value f0 / (f0^k + barrier)^{1/k}, evaluated in the log
// domain. `barrier` is the full barrier product (including beta_0).
double nav_potential(double f0, double barrier, double k);
// Exact gradient of nav_potential given the gradients of f0 and barrier.
Vector nav_gradient(double f0, const Vector& grad_f0, double barrier, const Vector& grad_barrier,
                    double k);
// f0 * barrier^{-1/k}: a strictly increasing function of the navigation
// potential with the same level sets, whose gradient is a positive multiple
// of the navigation gradient but is not exponentially small.
double nav_scaled_potential(double f0, double barrier, double k);
Vector nav_scaled_gradient(double f0, const Vector& grad_f0, double barrier,
                           const Vector& grad_barrier, double k);

double phi_k(const World& w, double k, const Vector& x);
Vector grad_phi_k(const World& w, double k, const Vector& x);
double scaled_phi_k(const World& w, double k, const Vector& x);
Vector scaled_grad_phi_k(const World& w, double k, const Vector& x);
// Terms of the navigation gradient before the positive scale factor:
// attractive = beta_0 beta grad f0, repulsive = -(f0/k) grad(beta_0 beta).
FlowTerms nav_gradient_terms(const World& w, double k, const Vector& x);

// beta_0(x) * beta(x) and its gradient.
double full_barrier(const World& w, const Vector& x);
Vector grad_full_barrier(const World& w, const Vector& x);

Vector g_nav(const World& w, double k, const Vector& x);
Vector g_old(const World& w, const FlowParams& params, const Vector& x);
Vector g_new(const World& w, double k, const Vector& x);
Vector eval_flow(FlowKind kind, const World& w, const FlowParams& params, const Vector& x);
FlowTerms flow_terms(FlowKind kind, const World& w, const FlowParams& params, const Vector& x);

std::vector<double> soft_switch(const World& w, const FlowParams& params, const Vector& x);
// B(x) = sum_i alpha_i A_i + max(0, 1 - sum_i alpha_i) I + ridge I.
Matrix correction_matrix(const World& w, const FlowParams& params, const Vector& x);

}  // namespace navflow
