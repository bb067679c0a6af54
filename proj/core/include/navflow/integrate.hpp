#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "navflow/flows.hpp"
#include "navflow/switched.hpp"

namespace navflow {

// What the integrator follows. The first three are the FlowKind fields; the
// last two follow the navigation gradient (full knowledge, or restricted to
// discovered obstacles) through its scaled form f0 * barrier^{-1/k}.
enum class Dynamics { kNavFn, kSecondOrder, kCurvatureCorrected, kGradientNavFn, kSwitchedNavFn };

std::string to_string(Dynamics d);
// "nav", "old", "new", "phi", "switched"
Dynamics parse_dynamics(std::string_view name);
Dynamics to_dynamics(FlowKind kind);
bool is_flow_kind(Dynamics d);
FlowKind to_flow_kind(Dynamics d);

struct SimConfig {
  double k = 20.0;
  double eta = 0.01;
  double epsilon_norm = 1e-4;
  std::size_t max_steps = 50000;
  Dynamics flow = Dynamics::kCurvatureCorrected;
  std::optional<double> sensor_range_c;
  std::uint64_t seed = 0;

  double switch_temperature = 0.5;
  double ridge = 1e-8;

  // LocalMinimum after this many consecutive stuck states.
  std::size_t stuck_window = 100;
  // A state counts as stuck when the field-to-attraction ratio is below
  // stuck_tolerance, or when the net displacement over the last window is
  // below stuck_displacement * stuck_window * eta (first-order runs only).
  // Never near the target.
  double stuck_tolerance = 1e-2;
  double stuck_displacement = 0.05;
  double stuck_min_potential_gradient = 1e-3;

  bool record_diagnostics = false;

  FlowParams flow_params() const { return {k, switch_temperature, ridge}; }
  void validate() const;
};

enum class Status { kSuccess, kCollision, kTimeout, kLocalMinimum };

std::string to_string(Status s);
Status parse_status(std::string_view name);

struct StepDiagnostics {
  double lyapunov = 0.0;  // 1/2 |x - x*|^2
  double phi = 0.0;       // phi_k(x) with full knowledge; NaN off free space
  double field_norm = 0.0;
};

struct Trajectory {
  std::vector<Vector> states;
  Status status = Status::kTimeout;
  std::size_t steps = 0;
  // min over accepted states of min(beta_0, beta_1, ..., beta_m)
  double min_beta_seen = 0.0;
  std::vector<StepDiagnostics> diagnostics;
  std::vector<AwarenessState::Discovery> discovery_log;
  // Second-order runs only.
  std::vector<Vector> velocities;
  std::vector<double> energies;

  // States that passed the free-space test (the collision state is excluded).
  std::size_t accepted_count() const {
    return status == Status::kCollision ? states.size() - 1 : states.size();
  }
};

// x + eta g / (|g| + eps)
Vector normalized_step(const Vector& x, const Vector& g, double eta, double epsilon_norm);

// Field followed by full-knowledge dynamics at x.
Vector dynamics_field(const World& w, const SimConfig& cfg, const Vector& x);
// One normalized step of a full-knowledge dynamics.
Vector step(const World& w, const SimConfig& cfg, const Vector& x);

Trajectory run(const World& w, const SimConfig& cfg, const Vector& x0);

// Unit-mass double integrator driven by the torque controller (scaled
// navigation gradient plus viscous damping), symplectic Euler with time
// step eta and the damping term taken implicitly. Uses the awareness set when cfg.sensor_range_c is set.
Trajectory run_second_order(const World& w, const SimConfig& cfg, const Vector& x0, const Vector& v0,
                            double damping_gain);

}  // namespace navflow
