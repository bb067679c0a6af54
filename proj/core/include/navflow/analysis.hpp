#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "navflow/flows.hpp"
#include "navflow/geometry.hpp"
#include "navflow/integrate.hpp"
#include "navflow/separation.hpp"

namespace navflow {

// --- Eccentricity condition ---------------------------------------------------

struct ConditionEntry {
  double lhs = 0.0;  // (lambda_max / lambda_min) (mu_max / mu_min)
  double rhs = 0.0;  // 1 + d_i / (r_i mu_max)
  double distance = 0.0;  // d_i = |x_i - x*|
  bool satisfied = false;
};

struct ConditionReport {
  std::vector<ConditionEntry> obstacles;
  bool overall = true;
};

ConditionReport check_condition(const World& w);

// --- Lyapunov candidates ------------------------------------------------------

inline constexpr double kDefaultTargetBall = 1e-4;  // delta

double global_V(const World& w, const Vector& x);
double global_Vdot(const World& w, const FlowParams& params, const Vector& x, FlowKind kind);

// Right-hand side of the global violation bound
//   f0 sum_i bar_beta_i <x - x*, x - x_i> / (k |x - x*|^2).
double violation_bound(const World& w, double k, const Vector& x);
// beta(x) <= violation_bound(x); throws DomainError inside the target ball.
bool in_violation_set(const World& w, double k, double delta, const Vector& x);

// V_i = 1/2 (x - x*)^T A_i (x - x*)
double local_V_i(const World& w, const Vector& x, std::size_t i);
// Vtilde_i = zone_max - (x - x*)^T A_i (x - x*)
double local_Vtilde_i(const World& w, const Vector& x, std::size_t i, double zone_max);

// Right-hand side of the obstacle-specific repulsion-zone bound; throws
// DomainError when bar_beta_i(x) = 0.
double repulsion_zone_bound(const World& w, double k, const Vector& x, std::size_t i);
bool in_repulsion_zone(const World& w, double k, double delta, const Vector& x, std::size_t i);

// Quarter of the smallest pairwise obstacle distance. With a single obstacle
// the obstacle-to-target distance takes the role of the pairwise distance.
double default_epsilon(const World& w);
bool in_epsilon_ball(const World& w, std::size_t i, double epsilon, const Vector& x);

// max of (x - x*)^T A_i (x - x*) over the repulsion zone of obstacle i inside
// its epsilon ball: samples along random rays from the centre, then compass
// search. Empty when no sample lands in the zone.
std::optional<double> repulsion_zone_max(const World& w, double k, double delta, std::size_t i,
                                         double epsilon, std::size_t samples, std::uint64_t seed);

// --- Configuration graph ------------------------------------------------------

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  // Hyperplane separating O_from from conv(O_to U {x*}), normal toward O_to.
  Hyperplane witness;
};

struct PairConditions {
  std::size_t i = 0;
  std::size_t j = 0;
  bool condition1 = false;  // some hyperplane puts x* on O_j's side
  bool condition2 = false;  // some hyperplane puts x* on O_i's side
  std::optional<Hyperplane> witness1;
  std::optional<Hyperplane> witness2;
};

struct ConfigGraph {
  std::vector<std::size_t> nodes;
  std::vector<GraphEdge> edges;
  std::vector<PairConditions> pairs;  // every ordered pair i != j
  bool is_dag = true;
  std::vector<std::vector<std::size_t>> cycles;
};

// Condition 1 for (i, j): O_i strictly separable from conv(O_j U {x*}).
std::optional<Hyperplane> condition1_witness(const World& w, std::size_t i, std::size_t j);
ConfigGraph build_config_graph(const World& w);

// --- Stuck detection ----------------------------------------------------------

// |attractive + repulsive| / |attractive|; zero at a critical point.
double stuck_ratio(const FlowTerms& terms);
// Navigation gradient ~ 0 (scale-free ratio of the exact gradient terms)
// while |grad f0| is not.
bool stuck_detector(const World& w, double k, const Vector& x, double tol_g = 1e-6,
                    double tol_f = 1e-3);

// --- Hyperplane crossing ------------------------------------------------------

struct CrossingReport {
  std::size_t samples = 0;
  std::size_t positive = 0;
  double max_normal_velocity = 0.0;  // max <n, g_new(x)> over samples
  double delta_eps = 0.0;            // min beta(x) <n, x - x*>
  double repulsion_bound = 0.0;      // C = max f0 sum_i bar_beta_i <n, x - x_i>
  double k_threshold = 0.0;          // C / delta_eps (0 when C <= 0)
  Hyperplane oriented;               // normal points away from x*
};

// Samples points of the hyperplane inside the workspace. Throws
// ValidationError when the plane touches an obstacle or contains x*.
CrossingReport one_way_crossing_check(const World& w, const FlowParams& params, const Hyperplane& plane,
                                      std::size_t samples, std::uint64_t seed = 1);

// --- Repulsion-zone boundary dynamics -----------------------------------------

// Point where the ray x_i + t u (t > 0) first leaves the repulsion zone of
// obstacle i, if that happens within `max_extent` of the obstacle surface.
std::optional<Vector> zone_boundary_on_ray(const World& w, double k, std::size_t i, const Vector& u,
                                           double max_extent);

// Unit n in span{x - x*, x - x_i} with <n, x - x*> = 0 and <n, x - x_i> > 0.
// Empty when the two directions are aligned.
std::optional<Vector> lemma_normal(const World& w, std::size_t i, const Vector& x);

struct OutwardMotionReport {
  std::vector<double> k_values;
  std::vector<double> min_normal_velocity;  // per k, over zone-boundary samples
  std::vector<std::size_t> sample_counts;
  std::optional<double> threshold;          // first k from which every later k passes
};

// Doubling search k = k_start, 2 k_start, ... <= k_max.
OutwardMotionReport outward_motion_threshold(const World& w, std::size_t i, std::size_t ray_samples,
                                             double k_start, double k_max);

struct EquilibriumReport {
  bool found = false;
  Vector point;                 // x_s
  double alignment = 0.0;       // a in (x_s - x*) = a (x_s - x_i)
  double max_real_eigenvalue = 0.0;
  Matrix jacobian;
};

// Locates the critical point of g_new on the ray from x_i away from x* and
// reports the spectrum of its finite-difference Jacobian.
EquilibriumReport aligned_equilibrium(const World& w, double k, std::size_t i);

// Central finite-difference Jacobian of g_new.
Matrix g_new_jacobian(const World& w, double k, const Vector& x, double h);

// --- Empirical k scan ---------------------------------------------------------

struct KScanReport {
  std::vector<double> k_values;
  std::vector<std::size_t> successes;        // runs reaching the target, per k
  std::vector<std::size_t> local_violations;  // V_i increases outside the zone, per k
  std::size_t runs_per_k = 0;
  std::optional<double> smallest_passing;     // first k with every run successful and no violations
};

// Runs `base` from every start for k = k_step, 2 k_step, ... <= k_max. A k
// passes when every run succeeds and, wherever a step stays inside an
// obstacle's epsilon ball and outside its repulsion zone, V_i decreases.
// The result is an empirical bound, not the minimal k of the convergence theorem.
KScanReport k_scan(const World& w, const SimConfig& base, const std::vector<Vector>& starts,
                   double k_step = 10.0, double k_max = 200.0);

}  // namespace navflow
