#include "navflow/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "navflow/analysis.hpp"
#include "navflow/errors.hpp"

namespace navflow {

std::string to_string(Dynamics d) {
  switch (d) {
    case Dynamics::kNavFn: return "nav";
    case Dynamics::kSecondOrder: return "old";
    case Dynamics::kCurvatureCorrected: return "new";
    case Dynamics::kGradientNavFn: return "phi";
    case Dynamics::kSwitchedNavFn: return "switched";
  }
  return "unknown";
}

Dynamics parse_dynamics(std::string_view name) {
  if (name == "phi" || name == "GradientNavFn") return Dynamics::kGradientNavFn;
  if (name == "switched" || name == "SwitchedNavFn") return Dynamics::kSwitchedNavFn;
  return to_dynamics(parse_flow_kind(name));
}

Dynamics to_dynamics(FlowKind kind) {
  switch (kind) {
    case FlowKind::kNavFn: return Dynamics::kNavFn;
    case FlowKind::kSecondOrder: return Dynamics::kSecondOrder;
    case FlowKind::kCurvatureCorrected: return Dynamics::kCurvatureCorrected;
  }
  return Dynamics::kCurvatureCorrected;
}

bool is_flow_kind(Dynamics d) {
  return d == Dynamics::kNavFn || d == Dynamics::kSecondOrder || d == Dynamics::kCurvatureCorrected;
}

FlowKind to_flow_kind(Dynamics d) {
  switch (d) {
    case Dynamics::kNavFn: return FlowKind::kNavFn;
    case Dynamics::kSecondOrder: return FlowKind::kSecondOrder;
    case Dynamics::kCurvatureCorrected: return FlowKind::kCurvatureCorrected;
    default: throw ValidationError("dynamics '" + to_string(d) + "' is not a flow kind");
  }
}

void SimConfig::validate() const {
  flow_params().validate();
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be positive");
  if (!(epsilon_norm > 0.0) || !std::isfinite(epsilon_norm)) {
    throw ValidationError("epsilon_norm must be positive");
  }
  if (max_steps < 1) throw ValidationError("max_steps must be at least 1");
  if (stuck_window < 1) throw ValidationError("stuck_window must be at least 1");
  if (!(stuck_tolerance >= 0.0)) throw ValidationError("stuck_tolerance must be non-negative");
  if (!(stuck_displacement >= 0.0)) throw ValidationError("stuck_displacement must be non-negative");
  if (sensor_range_c && !(*sensor_range_c > 0.0)) throw ValidationError("sensor range c must be positive");
  if (flow == Dynamics::kSwitchedNavFn && !sensor_range_c) {
    throw ValidationError("switched dynamics require a sensor range c");
  }
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kSuccess: return "Success";
    case Status::kCollision: return "Collision";
    case Status::kTimeout: return "Timeout";
    case Status::kLocalMinimum: return "LocalMinimum";
  }
  return "unknown";
}

Status parse_status(std::string_view name) {
  if (name == "Success") return Status::kSuccess;
  if (name == "Collision") return Status::kCollision;
  if (name == "Timeout") return Status::kTimeout;
  if (name == "LocalMinimum") return Status::kLocalMinimum;
  throw ValidationError("unknown status '" + std::string(name) + "'");
}

Vector normalized_step(const Vector& x, const Vector& g, double eta, double epsilon_norm) {
  if (x.size() != g.size()) throw DimensionError("normalized_step: dimension mismatch");
  return x + (eta / (g.norm() + epsilon_norm)) * g;
}

namespace {

struct FieldEval {
  Vector field;
  FlowTerms terms;  // split used by the stuck test
};

FieldEval full_field(const World& w, const SimConfig& cfg, const Vector& x) {
  if (is_flow_kind(cfg.flow)) {
    FlowTerms t = flow_terms(to_flow_kind(cfg.flow), w, cfg.flow_params(), x);
    Vector g = t.total();
    return {std::move(g), std::move(t)};
  }
  if (cfg.flow == Dynamics::kGradientNavFn) {
    return {-scaled_grad_phi_k(w, cfg.k, x), nav_gradient_terms(w, cfg.k, x)};
  }
  throw ValidationError("switched dynamics need an awareness state");
}

double min_barrier_all(const World& w, const Vector& x) {
  double lo = w.workspace().value(x);
  for (const auto& o : w.obstacles()) lo = std::min(lo, o.value(x));
  return lo;
}

double diagnostic_phi(const World& w, double k, const Vector& x) {
  if (!in_closed_free_space(w, x)) return std::numeric_limits<double>::quiet_NaN();
  return phi_k(w, k, x);
}

class StuckMonitor {
 public:
  // The displacement test assumes steps of length about eta, which holds for
  // the normalized first-order update only.
  StuckMonitor(const SimConfig& cfg, bool use_displacement) : cfg_(cfg), use_displacement_(use_displacement) {}

  // Returns true once the detector has fired for stuck_window consecutive states.
  bool observe(const World& w, const std::vector<Vector>& states, const FlowTerms& terms) {
    const Vector& x = states.back();
    bool stuck = false;
    const auto& p = w.potential();
    const bool away = (x - p.target()).norm() > 2.0 * cfg_.eta &&
                      p.gradient(x).norm() > cfg_.stuck_min_potential_gradient;
    if (away) {
      if (stuck_ratio(terms) < cfg_.stuck_tolerance) stuck = true;
      const std::size_t window = cfg_.stuck_window;
      if (use_displacement_ && states.size() > window) {
        const double travelled = (x - states[states.size() - 1 - window]).norm();
        if (travelled < cfg_.stuck_displacement * static_cast<double>(window) * cfg_.eta) stuck = true;
      }
    }
    run_ = stuck ? run_ + 1 : 0;
    return run_ >= cfg_.stuck_window;
  }

 private:
  const SimConfig& cfg_;
  bool use_displacement_;
  std::size_t run_ = 0;
};

void require_start(const World& w, const SimConfig& cfg, const Vector& x0) {
  cfg.validate();
  if (x0.size() != w.dimension()) throw DimensionError("run: start dimension mismatch");
  if (!in_free_space(w, x0)) throw ValidationError("run: start state is not in free space");
  if (cfg.sensor_range_c && std::isfinite(*cfg.sensor_range_c)) {
    const double bound = max_safe_step(w, *cfg.sensor_range_c);
    if (cfg.eta > bound) {
      throw ValidationError("run: eta exceeds the safe step c / (2 max|A_i| diameter) = " +
                            std::to_string(bound));
    }
  }
}

void record(Trajectory& traj, const World& w, const SimConfig& cfg, const Vector& x, double field_norm) {
  if (!cfg.record_diagnostics) return;
  traj.diagnostics.push_back({0.5 * (x - w.potential().target()).squaredNorm(), diagnostic_phi(w, cfg.k, x),
                              field_norm});
}

}  // namespace

Vector dynamics_field(const World& w, const SimConfig& cfg, const Vector& x) {
  return full_field(w, cfg, x).field;
}

Vector step(const World& w, const SimConfig& cfg, const Vector& x) {
  return normalized_step(x, dynamics_field(w, cfg, x), cfg.eta, cfg.epsilon_norm);
}

Trajectory run(const World& w, const SimConfig& cfg, const Vector& x0) {
  require_start(w, cfg, x0);
  const bool switched = cfg.flow == Dynamics::kSwitchedNavFn;
  const Vector& target = w.potential().target();

  Trajectory traj;
  traj.states.push_back(x0);
  traj.min_beta_seen = min_barrier_all(w, x0);

  std::optional<AwarenessState> aware;
  if (switched) {
    AwarenessState s(*cfg.sensor_range_c);
    aware = update_awareness(s, w, x0);
  }

  if ((x0 - target).norm() < cfg.eta) {
    traj.status = Status::kSuccess;
    record(traj, w, cfg, x0, 0.0);
    if (aware) traj.discovery_log = aware->discovery_log();
    return traj;
  }

  StuckMonitor monitor(cfg, true);
  traj.status = Status::kTimeout;
  Vector x = x0;
  for (std::size_t t = 0; t < cfg.max_steps; ++t) {
    Vector g;
    FlowTerms terms;
    if (switched) {
      if (!in_partial_free_space(w, *aware, x)) throw NumericalError("run: left the partial free space");
      terms = partial_gradient_terms(w, *aware, cfg.k, x);
      g = -partial_scaled_grad(w, *aware, cfg.k, x);
    } else {
      FieldEval e = full_field(w, cfg, x);
      g = std::move(e.field);
      terms = std::move(e.terms);
    }
    if (!g.allFinite()) throw NumericalError("run: non-finite field at step " + std::to_string(t));
    record(traj, w, cfg, x, g.norm());

    Vector next = normalized_step(x, g, cfg.eta, cfg.epsilon_norm);
    traj.steps = t + 1;
    traj.states.push_back(next);
    if (!in_free_space(w, next)) {
      traj.status = Status::kCollision;
      record(traj, w, cfg, next, std::numeric_limits<double>::quiet_NaN());
      break;
    }
    x = std::move(next);
    traj.min_beta_seen = std::min(traj.min_beta_seen, min_barrier_all(w, x));
    if (switched) {
      aware->set_step(t + 1);
      aware = update_awareness(*aware, w, x);
    }
    if ((x - target).norm() < cfg.eta) {
      traj.status = Status::kSuccess;
      record(traj, w, cfg, x, 0.0);
      break;
    }
    if (monitor.observe(w, traj.states, terms)) {
      traj.status = Status::kLocalMinimum;
      record(traj, w, cfg, x, std::numeric_limits<double>::quiet_NaN());
      break;
    }
  }
  if (traj.status == Status::kTimeout) record(traj, w, cfg, x, std::numeric_limits<double>::quiet_NaN());
  if (aware) traj.discovery_log = aware->discovery_log();
  return traj;
}

Trajectory run_second_order(const World& w, const SimConfig& cfg, const Vector& x0, const Vector& v0,
                            double damping_gain) {
  require_start(w, cfg, x0);
  if (!(damping_gain > 0.0)) throw ValidationError("damping gain must be positive");
  if (v0.size() != x0.size()) throw DimensionError("run_second_order: velocity dimension mismatch");
  const Vector& target = w.potential().target();
  const double dt = cfg.eta;

  AwarenessState s = cfg.sensor_range_c ? update_awareness(AwarenessState(*cfg.sensor_range_c), w, x0)
                                        : AwarenessState::omniscient(w);
  auto energy = [&](const Vector& x, const Vector& v) {
    return 0.5 * v.squaredNorm() + partial_scaled_phi_k(w, s, cfg.k, x);
  };

  Trajectory traj;
  traj.states.push_back(x0);
  traj.velocities.push_back(v0);
  traj.energies.push_back(energy(x0, v0));
  traj.min_beta_seen = min_barrier_all(w, x0);
  traj.status = Status::kTimeout;

  auto converged = [&](const Vector& x, const Vector& v) {
    return (x - target).norm() < cfg.eta && v.norm() < cfg.eta;
  };
  if (converged(x0, v0)) {
    traj.status = Status::kSuccess;
    traj.discovery_log = s.discovery_log();
    return traj;
  }

  Vector x = x0;
  Vector v = v0;
  StuckMonitor monitor(cfg, false);
  for (std::size_t t = 0; t < cfg.max_steps; ++t) {
    const Vector grad = partial_scaled_grad(w, s, cfg.k, x);
    // Semi-implicit damping keeps the update stable for large gains.
    Vector v_next = (v - dt * grad) / (1.0 + dt * damping_gain);
    Vector x_next = x + dt * v_next;
    if (!v_next.allFinite() || !x_next.allFinite()) {
      throw NumericalError("run_second_order: non-finite state at step " + std::to_string(t));
    }
    traj.steps = t + 1;
    traj.states.push_back(x_next);
    traj.velocities.push_back(v_next);
    if (!in_free_space(w, x_next) || !in_partial_free_space(w, s, x_next)) {
      traj.status = Status::kCollision;
      traj.energies.push_back(std::numeric_limits<double>::quiet_NaN());
      break;
    }
    x = std::move(x_next);
    v = std::move(v_next);
    traj.min_beta_seen = std::min(traj.min_beta_seen, min_barrier_all(w, x));
    traj.energies.push_back(energy(x, v));
    s.set_step(t + 1);
    s = update_awareness(s, w, x);
    if (converged(x, v)) {
      traj.status = Status::kSuccess;
      break;
    }
    const FlowTerms terms = partial_gradient_terms(w, s, cfg.k, x);
    const bool fired = monitor.observe(w, traj.states, terms);
    if (fired && v.norm() < cfg.eta) {
      traj.status = Status::kLocalMinimum;
      break;
    }
  }
  traj.discovery_log = s.discovery_log();
  return traj;
}

}  // namespace navflow
