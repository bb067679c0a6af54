#include "navflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "navflow/errors.hpp"
#include "navflow/random.hpp"

namespace navflow {

namespace {

void require_index(const World& w, std::size_t i) {
  if (i >= w.obstacle_count()) throw std::out_of_range("obstacle index out of range");
}

void require_dim(const World& w, const Vector& x, const char* what) {
  if (x.size() != w.dimension()) throw DimensionError(std::string(what) + ": dimension mismatch");
}

// Uniform direction on the unit sphere.
Vector random_direction(Rng& rng, int n) {
  Vector u(n);
  do {
    for (int j = 0; j < n; ++j) u[j] = rng.normal();
  } while (u.norm() < 1e-12);
  return u.normalized();
}

}  // namespace

ConditionReport check_condition(const World& w) {
  ConditionReport report;
  const auto& p = w.potential();
  const double q_ratio = p.lambda_max() / p.lambda_min();
  for (const auto& o : w.obstacles()) {
    ConditionEntry e;
    e.distance = (o.center() - p.target()).norm();
    e.lhs = q_ratio * (o.mu_max() / o.mu_min());
    e.rhs = 1.0 + e.distance / (o.radius() * o.mu_max());
    e.satisfied = e.lhs < e.rhs;
    report.overall = report.overall && e.satisfied;
    report.obstacles.push_back(e);
  }
  return report;
}

double global_V(const World& w, const Vector& x) {
  require_dim(w, x, "global_V");
  return 0.5 * (x - w.potential().target()).squaredNorm();
}

double global_Vdot(const World& w, const FlowParams& params, const Vector& x, FlowKind kind) {
  require_dim(w, x, "global_Vdot");
  return (x - w.potential().target()).dot(eval_flow(kind, w, params, x));
}

double violation_bound(const World& w, double k, const Vector& x) {
  require_dim(w, x, "violation_bound");
  const Vector diff = x - w.potential().target();
  const BarrierTerms t = barrier_terms(w, x);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
    sum += t.omitted[i] * diff.dot(x - w.obstacles()[i].center());
  }
  return w.potential().value(x) * sum / (k * diff.squaredNorm());
}

bool in_violation_set(const World& w, double k, double delta, const Vector& x) {
  require_dim(w, x, "in_violation_set");
  if ((x - w.potential().target()).squaredNorm() <= delta) {
    throw DomainError("in_violation_set: point is inside the target ball");
  }
  return eval_beta(w, x) <= violation_bound(w, k, x);
}

double local_V_i(const World& w, const Vector& x, std::size_t i) {
  require_index(w, i);
  require_dim(w, x, "local_V_i");
  return 0.5 * w.obstacles()[i].a().quadratic_form(x - w.potential().target());
}

double local_Vtilde_i(const World& w, const Vector& x, std::size_t i, double zone_max) {
  require_index(w, i);
  require_dim(w, x, "local_Vtilde_i");
  return zone_max - w.obstacles()[i].a().quadratic_form(x - w.potential().target());
}

double repulsion_zone_bound(const World& w, double k, const Vector& x, std::size_t i) {
  require_index(w, i);
  require_dim(w, x, "repulsion_zone_bound");
  const BarrierTerms t = barrier_terms(w, x);
  if (t.omitted[i] == 0.0) throw DomainError("repulsion zone: bar_beta_i vanishes at x");
  const Matrix& a = w.obstacles()[i].a().matrix();
  const Vector diff = x - w.potential().target();
  const Vector a_diff = a * diff;
  double sum = 0.0;
  for (std::size_t l = 0; l < w.obstacle_count(); ++l) {
    sum += t.omitted[l] * a_diff.dot(x - w.obstacles()[l].center());
  }
  return w.potential().value(x) * sum / (k * t.omitted[i] * diff.dot(a_diff));
}

bool in_repulsion_zone(const World& w, double k, double delta, const Vector& x, std::size_t i) {
  require_index(w, i);
  require_dim(w, x, "in_repulsion_zone");
  if ((x - w.potential().target()).squaredNorm() <= delta) {
    throw DomainError("in_repulsion_zone: point is inside the target ball");
  }
  return w.obstacles()[i].value(x) <= repulsion_zone_bound(w, k, x, i);
}

double default_epsilon(const World& w) {
  const std::size_t m = w.obstacle_count();
  if (m == 0) throw ValidationError("default_epsilon: world has no obstacles");
  double best = std::numeric_limits<double>::infinity();
  if (m == 1) {
    best = point_distance(w.obstacles()[0], w.potential().target());
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      best = std::min(best, convex_distance(ConvexSet::of(w.obstacles()[i]), ConvexSet::of(w.obstacles()[j])).distance);
    }
  }
  return 0.25 * best;
}

bool in_epsilon_ball(const World& w, std::size_t i, double epsilon, const Vector& x) {
  require_index(w, i);
  require_dim(w, x, "in_epsilon_ball");
  return point_distance(w.obstacles()[i], x) < epsilon;
}

std::optional<Vector> zone_boundary_on_ray(const World& w, double k, std::size_t i, const Vector& u,
                                           double max_extent) {
  require_index(w, i);
  require_dim(w, u, "zone_boundary_on_ray");
  const Ellipsoid& o = w.obstacles()[i];
  const Vector dir = u.normalized();
  const Vector& target = w.potential().target();
  const double t_surface = o.radius() / std::sqrt(o.a().quadratic_form(dir));
  const double scale = o.semi_axes().maxCoeff();

  // margin < 0 inside the zone
  auto margin = [&](double t) -> std::optional<double> {
    const Vector x = o.center() + t * dir;
    if ((x - target).squaredNorm() <= kDefaultTargetBall || !(w.workspace().value(x) > 0.0)) return {};
    const BarrierTerms terms = barrier_terms(w, x);
    if (terms.omitted[i] <= 0.0) return {};
    return o.value(x) - repulsion_zone_bound(w, k, x, i);
  };

  const double t0 = t_surface * (1.0 + 1e-12) + 1e-15 * scale;
  const auto m0 = margin(t0);
  if (!m0 || !(*m0 < 0.0)) return {};
  const int kScan = 400;
  const double dt = max_extent / kScan;
  double lo = t0;
  for (int s = 1; s <= kScan; ++s) {
    const double hi = t0 + s * dt;
    const auto mh = margin(hi);
    if (!mh) return {};
    if (*mh >= 0.0) {
      double a = lo;
      double b = hi;
      for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + b); ++it) {
        const double mid = 0.5 * (a + b);
        const auto mm = margin(mid);
        if (!mm) return {};
        (*mm < 0.0 ? a : b) = mid;
      }
      return Vector(o.center() + b * dir);
    }
    lo = hi;
  }
  return {};
}

std::optional<double> repulsion_zone_max(const World& w, double k, double delta, std::size_t i,
                                         double epsilon, std::size_t samples, std::uint64_t seed) {
  require_index(w, i);
  const Ellipsoid& o = w.obstacles()[i];
  const Vector& target = w.potential().target();
  const int n = w.dimension();
  Rng rng(seed);
  auto form = [&](const Vector& x) { return o.a().quadratic_form(x - target); };
  auto inside = [&](const Vector& x) {
    if ((x - target).squaredNorm() <= delta || !in_free_space(w, x)) return false;
    if (!in_epsilon_ball(w, i, epsilon, x)) return false;
    try {
      return in_repulsion_zone(w, k, delta, x, i);
    } catch (const DomainError&) {
      return false;
    }
  };

  // Rays from the centre: the zone hugs the surface, so each ray contributes
  // its first zone segment, sampled uniformly up to the zone edge.
  std::optional<double> best;
  Vector best_x;
  const int kPerRay = 8;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector u = random_direction(rng, n);
    const auto edge = zone_boundary_on_ray(w, k, i, u, epsilon);
    if (!edge) continue;
    const double t_surface = o.radius() / std::sqrt(o.a().quadratic_form(u));
    const double t_edge = (*edge - o.center()).norm();
    for (int j = 0; j <= kPerRay; ++j) {
      const double frac = j == kPerRay ? 1.0 - 1e-9 : (j + 0.5) / (kPerRay + 1);
      const double t = t_surface + (t_edge - t_surface) * frac;
      const Vector x = o.center() + t * u;
      if (!inside(x)) continue;
      const double f = form(x);
      if (!best || f > *best) {
        best = f;
        best_x = x;
      }
    }
  }
  if (!best) return {};

  // Compass search inside the zone.
  double step = 0.1 * epsilon;
  Vector x = best_x;
  while (step > 1e-9 * epsilon) {
    bool moved = false;
    for (int j = 0; j < n && !moved; ++j) {
      for (double sign : {1.0, -1.0}) {
        Vector y = x;
        y[j] += sign * step;
        if (inside(y) && form(y) > *best) {
          best = form(y);
          x = y;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

std::optional<Hyperplane> condition1_witness(const World& w, std::size_t i, std::size_t j) {
  require_index(w, i);
  require_index(w, j);
  const SeparationResult r = convex_distance(ConvexSet::of(w.obstacles()[i]),
                                             ConvexSet::hull(w.obstacles()[j], w.potential().target()));
  if (r.distance > kSeparationTolerance) return r.hyperplane;
  return {};
}

ConfigGraph build_config_graph(const World& w) {
  ConfigGraph g;
  const std::size_t m = w.obstacle_count();
  for (std::size_t i = 0; i < m; ++i) g.nodes.push_back(i);

  std::vector<std::vector<std::optional<Hyperplane>>> c1(m, std::vector<std::optional<Hyperplane>>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) c1[i][j] = condition1_witness(w, i, j);
    }
  }
  std::vector<std::vector<std::size_t>> adj(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      PairConditions pc;
      pc.i = i;
      pc.j = j;
      pc.witness1 = c1[i][j];
      pc.witness2 = c1[j][i];
      pc.condition1 = pc.witness1.has_value();
      pc.condition2 = pc.witness2.has_value();
      if (pc.condition1 && !pc.condition2) {
        g.edges.push_back({i, j, *pc.witness1});
        adj[i].push_back(j);
      }
      g.pairs.push_back(std::move(pc));
    }
  }

  // Depth-first search; each back edge closes one reported cycle.
  enum class Mark { kWhite, kGrey, kBlack };
  std::vector<Mark> mark(m, Mark::kWhite);
  std::vector<std::size_t> stack;
  std::function<void(std::size_t)> visit = [&](std::size_t u) {
    mark[u] = Mark::kGrey;
    stack.push_back(u);
    for (std::size_t v : adj[u]) {
      if (mark[v] == Mark::kGrey) {
        auto it = std::find(stack.begin(), stack.end(), v);
        g.cycles.emplace_back(it, stack.end());
      } else if (mark[v] == Mark::kWhite) {
        visit(v);
      }
    }
    stack.pop_back();
    mark[u] = Mark::kBlack;
  };
  for (std::size_t u = 0; u < m; ++u) {
    if (mark[u] == Mark::kWhite) visit(u);
  }
  g.is_dag = g.cycles.empty();
  return g;
}

double stuck_ratio(const FlowTerms& terms) {
  const double a = terms.attractive.norm();
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  return terms.total().norm() / a;
}

bool stuck_detector(const World& w, double k, const Vector& x, double tol_g, double tol_f) {
  require_dim(w, x, "stuck_detector");
  if (!in_free_space(w, x)) throw DomainError("stuck_detector: point is not in free space");
  if (!(w.potential().gradient(x).norm() > tol_f)) return false;
  return stuck_ratio(nav_gradient_terms(w, k, x)) < tol_g;
}

CrossingReport one_way_crossing_check(const World& w, const FlowParams& params, const Hyperplane& plane,
                                      std::size_t samples, std::uint64_t seed) {
  params.validate();
  const int n = w.dimension();
  if (plane.normal.size() != n) throw DimensionError("one_way_crossing_check: normal dimension mismatch");
  const double norm = plane.normal.norm();
  if (!(norm > 0.0)) throw ValidationError("one_way_crossing_check: zero normal");
  Hyperplane h{plane.normal / norm, plane.offset / norm};

  const Vector& target = w.potential().target();
  const double target_side = h.signed_distance(target);
  if (!(std::fabs(target_side) > 1e-12 * (1.0 + target.norm()))) {
    throw ValidationError("one_way_crossing_check: the target lies on the hyperplane");
  }
  if (target_side > 0.0) {
    h.normal = -h.normal;
    h.offset = -h.offset;
  }
  for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
    const Ellipsoid& o = w.obstacles()[i];
    const double reach = o.radius() * std::sqrt(h.normal.dot(o.a().inverse() * h.normal));
    if (!(std::fabs(h.signed_distance(o.center())) > reach)) {
      throw ValidationError("one_way_crossing_check: hyperplane intersects obstacle " + std::to_string(i));
    }
  }

  // Orthonormal basis of the plane.
  const Eigen::HouseholderQR<Matrix> qr(h.normal);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix basis = q.rightCols(n - 1);
  const Vector origin = w.workspace().center() - h.signed_distance(w.workspace().center()) * h.normal;
  const double radius = 0.5 * w.workspace().diameter();

  CrossingReport rep;
  rep.oriented = h;
  rep.max_normal_velocity = -std::numeric_limits<double>::infinity();
  rep.delta_eps = std::numeric_limits<double>::infinity();
  rep.repulsion_bound = -std::numeric_limits<double>::infinity();
  Rng rng(seed);
  std::size_t attempts = 0;
  while (rep.samples < samples && attempts < 1000 * samples) {
    ++attempts;
    Vector c(n - 1);
    do {
      for (int j = 0; j < n - 1; ++j) c[j] = rng.uniform(-radius, radius);
    } while (c.norm() > radius);
    const Vector x = origin + basis * c;
    if (!in_free_space(w, x)) continue;
    ++rep.samples;
    const Vector g = g_new(w, params.k, x);
    const double vn = h.normal.dot(g);
    rep.max_normal_velocity = std::max(rep.max_normal_velocity, vn);
    if (vn > 0.0) ++rep.positive;

    const BarrierTerms t = barrier_terms(w, x);
    rep.delta_eps = std::min(rep.delta_eps, t.product * h.normal.dot(x - target));
    double sum = 0.0;
    for (std::size_t i = 0; i < w.obstacle_count(); ++i) {
      sum += t.omitted[i] * h.normal.dot(x - w.obstacles()[i].center());
    }
    rep.repulsion_bound = std::max(rep.repulsion_bound, w.potential().value(x) * sum);
  }
  if (rep.samples == 0) throw ValidationError("one_way_crossing_check: the plane misses the free space");
  rep.k_threshold = rep.repulsion_bound > 0.0 ? rep.repulsion_bound / rep.delta_eps : 0.0;
  return rep;
}

std::optional<Vector> lemma_normal(const World& w, std::size_t i, const Vector& x) {
  require_index(w, i);
  require_dim(w, x, "lemma_normal");
  const Vector a = x - w.potential().target();
  const Vector b = x - w.obstacles()[i].center();
  const double an = a.norm();
  if (an == 0.0) return {};
  const Vector au = a / an;
  const Vector perp = b - b.dot(au) * au;
  if (perp.norm() <= 1e-9 * b.norm()) return {};
  return Vector(perp.normalized());
}

OutwardMotionReport outward_motion_threshold(const World& w, std::size_t i, std::size_t ray_samples,
                                             double k_start, double k_max) {
  require_index(w, i);
  if (!(k_start > 0.0) || !(k_max >= k_start)) throw ValidationError("outward_motion_threshold: bad k range");
  const int n = w.dimension();
  const Ellipsoid& o = w.obstacles()[i];
  const double extent = w.obstacle_count() > 1 ? default_epsilon(w) : o.semi_axes().maxCoeff();

  // Fixed direction set so every k sees the same rays.
  std::vector<Vector> dirs;
  if (n == 2) {
    for (std::size_t s = 0; s < ray_samples; ++s) {
      const double th = 2.0 * std::numbers::pi * (s + 0.5) / ray_samples;
      Vector u(2);
      u << std::cos(th), std::sin(th);
      dirs.push_back(u);
    }
  } else {
    Rng rng(split_seed(0x5eed, i));
    for (std::size_t s = 0; s < ray_samples; ++s) dirs.push_back(random_direction(rng, n));
  }

  OutwardMotionReport rep;
  for (double k = k_start; k <= k_max * (1.0 + 1e-12); k *= 2.0) {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (const Vector& u : dirs) {
      const auto x = zone_boundary_on_ray(w, k, i, u, extent);
      if (!x) continue;
      const auto nrm = lemma_normal(w, i, *x);
      if (!nrm) continue;
      worst = std::min(worst, nrm->dot(g_new(w, k, *x)));
      ++count;
    }
    rep.k_values.push_back(k);
    rep.min_normal_velocity.push_back(count ? worst : std::numeric_limits<double>::quiet_NaN());
    rep.sample_counts.push_back(count);
  }
  // Smallest tested k from which every later tested k passes.
  for (std::size_t s = rep.k_values.size(); s-- > 0;) {
    const double v = rep.min_normal_velocity[s];
    if (rep.sample_counts[s] == 0 || !(v > 0.0)) break;
    rep.threshold = rep.k_values[s];
  }
  return rep;
}

Matrix g_new_jacobian(const World& w, double k, const Vector& x, double h) {
  require_dim(w, x, "g_new_jacobian");
  const int n = w.dimension();
  Matrix j(n, n);
  for (int c = 0; c < n; ++c) {
    Vector xp = x;
    Vector xm = x;
    xp[c] += h;
    xm[c] -= h;
    j.col(c) = (g_new(w, k, xp) - g_new(w, k, xm)) / (2.0 * h);
  }
  return j;
}

EquilibriumReport aligned_equilibrium(const World& w, double k, std::size_t i) {
  require_index(w, i);
  const Ellipsoid& o = w.obstacles()[i];
  const Vector& target = w.potential().target();
  EquilibriumReport rep;
  const Vector away = o.center() - target;
  if (!(away.norm() > 0.0)) return rep;
  const Vector u = away.normalized();
  const double t_surface = o.radius() / std::sqrt(o.a().quadratic_form(u));

  auto along = [&](double t) -> std::optional<double> {
    const Vector x = o.center() + t * u;
    if (!in_free_space(w, x)) return {};
    return u.dot(g_new(w, k, x));
  };

  // Outward push at the surface, inward pull further out: bracket the sign change.
  double lo = t_surface * (1.0 + 1e-9);
  auto f_lo = along(lo);
  if (!f_lo || !(*f_lo > 0.0)) return rep;
  double hi = lo;
  bool bracketed = false;
  for (int s = 0; s < 200; ++s) {
    hi = lo + (t_surface * 1e-3) * std::pow(1.1, s);
    const auto f = along(hi);
    if (!f) return rep;
    if (*f <= 0.0) {
      bracketed = true;
      break;
    }
  }
  if (!bracketed) return rep;
  double a = lo;
  double b = hi;
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    const double mid = 0.5 * (a + b);
    const auto f = along(mid);
    if (!f) return rep;
    (*f > 0.0 ? a : b) = mid;
  }
  Vector x = o.center() + 0.5 * (a + b) * u;
  const double h = 1e-6 * std::max(1.0, x.norm());

  // Newton polish on the full field (other obstacles bend it off the ray).
  for (int it = 0; it < 20; ++it) {
    const Vector g = g_new(w, k, x);
    const Matrix jac = g_new_jacobian(w, k, x, h);
    const Vector dx = jac.fullPivLu().solve(-g);
    if (!dx.allFinite() || !in_free_space(w, x + dx)) break;
    x += dx;
    if (dx.norm() < 1e-13 * std::max(1.0, x.norm())) break;
  }

  rep.found = true;
  rep.point = x;
  const Vector xs_target = x - target;
  const Vector xs_center = x - o.center();
  rep.alignment = xs_target.dot(xs_center) / xs_center.squaredNorm();
  rep.jacobian = g_new_jacobian(w, k, x, h);
  const Eigen::EigenSolver<Matrix> es(rep.jacobian);
  rep.max_real_eigenvalue = es.eigenvalues().real().maxCoeff();
  return rep;
}

KScanReport k_scan(const World& w, const SimConfig& base, const std::vector<Vector>& starts, double k_step,
                   double k_max) {
  if (!(k_step > 0.0) || !(k_max >= k_step)) throw ValidationError("k_scan: need 0 < k_step <= k_max");
  for (const Vector& x0 : starts) require_dim(w, x0, "k_scan");
  const std::size_t m = w.obstacle_count();
  std::vector<double> eps(m);
  if (m > 0) std::fill(eps.begin(), eps.end(), default_epsilon(w));

  KScanReport report;
  report.runs_per_k = starts.size();
  for (int step = 1; step * k_step <= k_max * (1 + 1e-12); ++step) {
    const double k = step * k_step;
    SimConfig cfg = base;
    cfg.k = k;
    std::size_t ok = 0, bad = 0;
    for (const Vector& x0 : starts) {
      const Trajectory t = run(w, cfg, x0);
      if (t.status == Status::kSuccess) ++ok;
      for (std::size_t s = 0; s + 1 < t.accepted_count(); ++s) {
        const Vector& x = t.states[s];
        const Vector& y = t.states[s + 1];
        if ((x - w.target()).squaredNorm() <= kDefaultTargetBall || (y - w.target()).squaredNorm() <= kDefaultTargetBall) continue;
        for (std::size_t i = 0; i < m; ++i) {
          if (!in_epsilon_ball(w, i, eps[i], x) || !in_epsilon_ball(w, i, eps[i], y)) continue;
          if (in_repulsion_zone(w, k, kDefaultTargetBall, x, i) || in_repulsion_zone(w, k, kDefaultTargetBall, y, i)) continue;
          if (!(local_V_i(w, y, i) < local_V_i(w, x, i))) ++bad;
        }
      }
    }
    report.k_values.push_back(k);
    report.successes.push_back(ok);
    report.local_violations.push_back(bad);
    if (!report.smallest_passing && ok == starts.size() && bad == 0) report.smallest_passing = k;
  }
  return report;
}

}  // namespace navflow
