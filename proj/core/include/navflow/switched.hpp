#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "navflow/flows.hpp"
#include "navflow/geometry.hpp"

namespace navflow {

// Obstacles whose c-neighbourhood {beta_i <= c} the agent has visited.
class AwarenessState {
 public:
  struct Discovery {
    std::size_t step;
    std::size_t obstacle;
    bool operator==(const Discovery&) const = default;
  };

  explicit AwarenessState(double sensor_range_c);
  // Everything known from the start (full-knowledge navigation).
  static AwarenessState omniscient(const World& w);

  double sensor_range() const { return c_; }
  const std::set<std::size_t>& discovered() const { return discovered_; }
  const std::vector<Discovery>& discovery_log() const { return log_; }
  bool knows(std::size_t i) const { return discovered_.count(i) != 0; }

  // Step index stamped on discoveries made by the next update.
  std::size_t step() const { return step_; }
  void set_step(std::size_t step) { step_ = step; }

 private:
  friend AwarenessState update_awareness(const AwarenessState& s, const World& w, const Vector& x);

  double c_;
  std::set<std::size_t> discovered_;
  std::vector<Discovery> log_;
  std::size_t step_ = 0;
};

AwarenessState update_awareness(const AwarenessState& s, const World& w, const Vector& x);

// beta_0(x) * prod_{i discovered} beta_i(x)
double partial_beta(const World& w, const AwarenessState& s, const Vector& x);
Vector grad_partial_beta(const World& w, const AwarenessState& s, const Vector& x);
// beta_0 > 0 and beta_i > 0 for every discovered i.
bool in_partial_free_space(const World& w, const AwarenessState& s, const Vector& x);

double partial_phi_k(const World& w, const AwarenessState& s, double k, const Vector& x);
Vector partial_grad(const World& w, const AwarenessState& s, double k, const Vector& x);
// Gradient of f0 * partial_beta^{-1/k}; parallel to partial_grad with a
// positive factor, free of the exponentially small (f0^k + .)^{-1-1/k} scale.
double partial_scaled_phi_k(const World& w, const AwarenessState& s, double k, const Vector& x);
Vector partial_scaled_grad(const World& w, const AwarenessState& s, double k, const Vector& x);

// attractive = partial_beta grad f0, repulsive = -(f0/k) grad partial_beta;
// partial_grad is their sum times (f0^k + partial_beta)^{-1-1/k}.
FlowTerms partial_gradient_terms(const World& w, const AwarenessState& s, double k, const Vector& x);

enum class GradientScale { kExact, kScaled };

// Returns (-gradient evaluated with the current awareness, awareness updated
// with x). The field ignores obstacles discovered at x: left limit.
std::pair<Vector, AwarenessState> switched_step_field(const World& w, const AwarenessState& s, double k,
                                                      const Vector& x,
                                                      GradientScale scale = GradientScale::kExact);

// Linear viscous damping d(x, v) = -gain * v.
Vector dissipative_field(const Vector& v, double damping_gain);

// tau = -grad + d(x, v)
Vector torque_controller(const World& w, const AwarenessState& s, double k, const Vector& x,
                         const Vector& v, double damping_gain,
                         GradientScale scale = GradientScale::kExact);

// Largest step length that cannot jump across an undiscovered obstacle's
// c-neighbourhood: c / (2 max_i |A_i| diameter).
double max_safe_step(const World& w, double sensor_range_c);

}  // namespace navflow
