#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kdvb/evolution.hpp"

namespace kdvb {

struct ControlProblem {
  GridPtr grid;
  double t0 = 0, T = 1;
  int nt = 100;
  Interval omega;
  Vec u0;
  Vec uT;  // empty or zero for null control
  double tau = 1e-10;
  double tol = 1e-6;
  int max_iter = 500;
};

inline void validate(const ControlProblem& p) {
  require(p.grid != nullptr, "control: missing grid");
  require(p.T > p.t0 && p.nt >= 1, "control: need T > t0 and nt >= 1");
  require(p.u0.size() == p.grid->n(), "control: u0 has wrong length");
  require(p.uT.size() == 0 || p.uT.size() == p.grid->n(), "control: uT has wrong length");
  require(p.tol > 0, "control: tolerance must be positive");
  require(p.tau >= 0, "control: tau must be nonnegative");
  require(p.max_iter >= 1, "control: need at least one iteration");
  require(mask_count(region_mask(*p.grid, p.omega)) > 0, "control: region contains no grid node");
}

struct ControlResult {
  Mat control;  // one column per stage slot, zero off the region mask
  std::vector<Stage> stages;
  Trajectory trajectory;
  Vec endpoint, target;
  double endpoint_error = 0;  // |u(T) - target| / max(|u0|, |uT|, 1)
  double free_endpoint_norm = 0;
  double control_norm = 0;    // L2(t0, T; L2)
  double duality_gap = 0;     // relative to the primal value
  double tau_effective = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> defect_history;
};

namespace detail {

inline double hnorm(const Grid& g, const Vec& v) { return std::sqrt(g.h() * v.squaredNorm()); }

// Conjugate residual on (Lambda + 2 tau' I) phi = -u_free(T) where Lambda maps
// a terminal adjoint state to the endpoint of the run driven by its masked
// adjoint trajectory.
inline ControlResult hum_solve(const ControlProblem& p, const Vec& start, const Vec& target, double scale) {
  const Grid& g = *p.grid;
  const int n = g.n();
  const Propagator Pf(build_operator(p.grid, OperatorKind::Forward), p.t0, p.T, p.nt);
  const Propagator Pa(build_operator(p.grid, OperatorKind::Adjoint), p.t0, p.T, p.nt);
  const Vec mask = region_mask(g, p.omega);
  const int n_omega = mask_count(mask);

  ControlResult r;
  r.stages = Pf.stages();
  r.tau_effective = p.tau * (p.T - p.t0) * n_omega / n;
  const double tp = r.tau_effective;

  auto control_of = [&](const Vec& phi) -> Mat { return mask.asDiagonal() * run_adjoint(Pa, phi).slot_values; };
  const Vec zero = Vec::Zero(n);
  auto lambda = [&](const Vec& phi) -> Vec {
    const Mat f = control_of(phi);
    return run_forward(Pf, zero, &f).states().col(p.nt);
  };
  auto dot = [&](const Vec& a, const Vec& b) { return g.h() * a.dot(b); };

  const Vec u_free = run_forward(Pf, start).states().col(p.nt);
  r.free_endpoint_norm = hnorm(g, u_free);
  Vec x = Vec::Zero(n), Mx = Vec::Zero(n);
  if (r.free_endpoint_norm > 0) {
    Vec res = -u_free;
    Vec Ar = lambda(res) + 2 * tp * res;
    Vec pdir = res, Ap = Ar;
    double rAr = dot(res, Ar);
    r.defect_history.push_back(r.free_endpoint_norm / scale);
    for (int it = 1; it <= p.max_iter; ++it) {
      // Regularized system solved to roundoff; the endpoint cannot improve.
      if (hnorm(g, res) <= 1e-15 * r.free_endpoint_norm) break;
      const double ApAp = dot(Ap, Ap);
      if (!(rAr > -1e-14 * hnorm(g, res) * hnorm(g, Ar)) || ApAp <= 0) {
        throw NumericalBreakdown("null_control: non-positive curvature at iteration " + std::to_string(it) +
                                 " (r.Ar = " + std::to_string(rAr) + ")");
      }
      const double alpha = rAr / ApAp;
      x += alpha * pdir;
      Mx += alpha * Ap;
      res -= alpha * Ap;
      r.iterations = it;
      const Vec uT_now = u_free + Mx - 2 * tp * x;
      const double defect = hnorm(g, uT_now) / scale;
      r.defect_history.push_back(defect);
      if (defect <= p.tol) break;
      const Vec Ar_new = lambda(res) + 2 * tp * res;
      const double rAr_new = dot(res, Ar_new);
      const double beta = rAr_new / rAr;
      pdir = res + beta * pdir;
      Ap = Ar_new + beta * Ap;
      rAr = rAr_new;
    }
  }
  r.control = control_of(x);
  r.trajectory = run_forward(Pf, start, &r.control);
  const Vec end_state = r.trajectory.states().col(p.nt);
  const double f2 = slot_pairing(g, r.stages, r.control, r.control);
  r.control_norm = std::sqrt(f2);
  const double defect = hnorm(g, end_state);
  r.endpoint_error = defect / scale;
  r.converged = r.endpoint_error <= p.tol;
  if (tp > 0) {
    const Vec resid = -end_state - 2 * tp * x;
    const double primal = 0.5 * f2 + defect * defect / (4 * tp);
    r.duality_gap = primal > 0 ? (g.h() * resid.squaredNorm() / (4 * tp)) / primal : 0.0;
  }
  r.endpoint = end_state + target;
  r.target = target;
  return r;
}

}  // namespace detail

inline ControlResult null_control(const ControlProblem& p) {
  validate(p);
  require(p.uT.size() == 0 || p.uT.isZero(0), "null_control: target must be zero");
  const double scale = std::max({detail::hnorm(*p.grid, p.u0), 1.0});
  return detail::hum_solve(p, p.u0, Vec::Zero(p.grid->n()), scale);
}

// Steers u0 to S(T) uT: null control of u0 - uT, then the free run of uT
// is added back.
inline ControlResult steering_control(const ControlProblem& p) {
  validate(p);
  require(p.uT.size() == p.grid->n(), "steering_control: target required");
  const Grid& g = *p.grid;
  const double scale = std::max({detail::hnorm(g, p.u0), detail::hnorm(g, p.uT), 1.0});
  const Propagator Pf(build_operator(p.grid, OperatorKind::Forward), p.t0, p.T, p.nt);
  const Trajectory free_target = run_forward(Pf, p.uT);
  ControlResult r = detail::hum_solve(p, p.u0 - p.uT, free_target.states().col(p.nt), scale);
  r.trajectory = run_forward(Pf, p.u0, &r.control);
  r.endpoint = r.trajectory.states().col(p.nt);
  r.endpoint_error = detail::hnorm(g, r.endpoint - r.target) / scale;
  r.converged = r.endpoint_error <= p.tol;
  return r;
}

// ------------------------------------------------------------ constructions

// 1 up to t = eps', 0 from T - eps', C^4 smooth step in between.
struct CutoffFunction {
  double eps_prime = 0, T = 0;

  CutoffFunction() = default;
  CutoffFunction(double eps, double eps_prime_, double T_) : eps_prime(eps_prime_), T(T_) {
    require(eps > 0 && eps < eps_prime && eps_prime < T / 2, "cutoff: need 0 < eps < eps' < T/2");
  }
  static double step(double s) {
    return s * s * s * s * s * (126 + s * (-420 + s * (540 + s * (-315 + s * 70))));
  }
  static double step_slope(double s) { return 630 * std::pow(s * (1 - s), 4); }
  double width() const { return T - 2 * eps_prime; }
  double operator()(double t) const {
    if (t <= eps_prime) return 1;
    if (t >= T - eps_prime) return 0;
    return 1 - step((t - eps_prime) / width());
  }
  double derivative(double t) const {
    if (t <= eps_prime || t >= T - eps_prime) return 0;
    return -step_slope((t - eps_prime) / width()) / width();
  }
};

inline double default_eps_prime(double eps, double T) { return 0.5 * (eps + T / 2); }

struct CompactSupportResult {
  Trajectory v;
  ControlResult control;
  int k_forced_end = 0, k_control_end = 0;  // macro indices
  double source_norm = 0;                   // L2(0, T; L2)
  double solution_norm = 0;                 // L2(0, T; L2)
  double constant = std::numeric_limits<double>::quiet_NaN();  // solution / source
  double decay_ratio = 0;                   // |v(t2 + eps)| / |v(t2)|
  double max_before_support = 0;            // max |v| on [0, t1 - eps]
  bool converged = true;
};

struct ControlSettings {
  Interval omega;
  double tau = 1e-10;
  double tol = 1e-6;
  int max_iter = 500;
};

// v solves v' = A v + f + (internal control on [t2, t2 + eps]) with v = 0 up
// to t1 and |v(t2 + eps)| <= tol |v(t2)|. Segment ends snap to macro steps
// inside [t2, t2 + eps].
inline CompactSupportResult compact_support_source_solution(const SourceTerm& f, double eps, const GridPtr& grid,
                                                            double T, int nt, const ControlSettings& cs) {
  const double t1 = f.t_a, t2 = f.t_b;
  require(std::isfinite(t1) && std::isfinite(t2) && t1 < t2, "compact support: source support must be [t1, t2]");
  require(eps > 0 && t1 - eps > 0 && t2 + eps < T, "compact support: need 0 < t1 - eps and t2 + eps < T");
  const double dt = T / nt;
  const int k2 = static_cast<int>(std::ceil(t2 / dt - 1e-9));
  const int k3 = static_cast<int>(std::floor((t2 + eps) / dt + 1e-9));
  require(k3 - k2 >= 1 && k3 < nt && k2 >= 1, "compact support: control window shorter than one step");
  const Grid& g = *grid;
  const int n = g.n();
  const DiscreteOperator A = build_operator(grid, OperatorKind::Forward);

  CompactSupportResult r;
  r.k_forced_end = k2;
  r.k_control_end = k3;
  Mat states(n, nt + 1);

  const Propagator P1(A, 0.0, k2 * dt, k2);
  const Mat slots = sample_slots(f, g, P1.stages());
  const Trajectory seg1 = run_forward(P1, Vec::Zero(n), &slots);
  states.leftCols(k2 + 1) = seg1.states();
  for (int s = 0; s < P1.slot_count(); ++s) r.source_norm += P1.stages()[s].dt * g.h() * slots.col(s).squaredNorm();
  r.source_norm = std::sqrt(r.source_norm);

  ControlProblem cp;
  cp.grid = grid;
  cp.t0 = k2 * dt;
  cp.T = k3 * dt;
  cp.nt = k3 - k2;
  cp.omega = cs.omega;
  cp.u0 = seg1.states().col(k2);
  cp.tau = cs.tau;
  // Tolerance relative to |v(t2)| rather than max(|v(t2)|, 1).
  const double v2 = l2_norm(g, cp.u0);
  cp.tol = v2 > 0 ? cs.tol * v2 / std::max(v2, 1.0) : cs.tol;
  cp.max_iter = cs.max_iter;
  r.control = null_control(cp);
  r.converged = r.control.converged;
  states.middleCols(k2, k3 - k2 + 1) = r.control.trajectory.states();

  const Trajectory seg3 = run_forward(Propagator(A, k3 * dt, T, nt - k3), r.control.endpoint);
  states.rightCols(nt - k3 + 1) = seg3.states();

  r.v = Trajectory(grid, 0.0, T, std::move(states), std::string(kSchemeTag) + "+segments");
  for (int k = 0; k <= nt && k * dt <= t1 - eps; ++k)
    r.max_before_support = std::max(r.max_before_support, r.v.states().col(k).cwiseAbs().maxCoeff());
  Vec sq(nt + 1);
  for (int k = 0; k <= nt; ++k) sq[k] = g.h() * r.v.states().col(k).squaredNorm();
  r.solution_norm = std::sqrt(r.v.time_integral(sq));
  if (r.source_norm > 0) r.constant = r.solution_norm / r.source_norm;
  const double at_t2 = r.v.norms()[k2];
  r.decay_ratio = at_t2 > 0 ? r.v.norms()[k3] / at_t2 : 0.0;
  return r;
}

struct ConstructionResult {
  Trajectory u;                 // assembled trajectory on the reporting grid
  CompactSupportResult corrector;
  CutoffFunction cutoff;
  double source_norm = 0;       // |cutoff' (u2 - u1)| in L2(0, T; L2)
  double initial_defect = 0;    // relative, plain L2
  double terminal_defect = 0;   // relative; plain L2 or e^{-2bx} weighted
  double early_deviation = 0;   // max over t <= eps' of |u(t) - S(t) u0|
};

namespace detail {

inline double rel(double num, double den) { return den > 0 ? num / den : num; }

// u = c u1 + (1 - c) u2 + w, w driven by c' (u2 - u1).
inline ConstructionResult assemble(const Trajectory& u1, const std::function<Vec(double)>& u2_at, const Mat& u2_levels,
                                   const CutoffFunction& cut, double eps, const ControlSettings& cs) {
  const GridPtr& grid = u1.grid();
  const double T = u1.T();
  const int nt = u1.steps();
  SourceTerm f;
  f.t_a = cut.eps_prime;
  f.t_b = T - cut.eps_prime;
  f.evaluator = [&](double t) -> Vec {
    const double d = cut.derivative(t);
    if (d == 0) return Vec::Zero(grid->n());
    return d * (u2_at(t) - u1.at(t));
  };
  ConstructionResult r;
  r.cutoff = cut;
  r.corrector = compact_support_source_solution(f, eps, grid, T, nt, cs);
  r.source_norm = r.corrector.source_norm;
  Mat states(grid->n(), nt + 1);
  for (int k = 0; k <= nt; ++k) {
    const double c = cut(u1.time(k));
    if (c == 1)
      states.col(k) = u1.states().col(k);
    else if (c == 0)
      states.col(k) = u2_levels.col(k);
    else
      states.col(k) = u2_levels.col(k) + c * (u1.states().col(k) - u2_levels.col(k));
    states.col(k) += r.corrector.v.states().col(k);
  }
  r.u = Trajectory(grid, 0.0, T, std::move(states), u1.scheme() + "+cutoff+corrector");
  return r;
}

}  // namespace detail

// u(0) = u0 and u(T) = S(T) uT on [-L, L].
inline ConstructionResult theorem_1_1_trajectory(const StateVector& u0, const StateVector& uT, double eps,
                                                 double eps_prime, double T, int nt, const ControlSettings& cs) {
  require_same_grid(*u0.grid, *uT.grid);
  const CutoffFunction cut(eps, eps_prime, T);
  const GridPtr& grid = u0.grid;
  const DiscreteOperator A = build_operator(grid, OperatorKind::Forward);
  const Trajectory u1 = evolve(A, u0, 0.0, T, nt);
  const Trajectory u2 = evolve(A, uT, 0.0, T, nt);
  ConstructionResult r =
      detail::assemble(u1, [&](double t) { return u2.at(t); }, u2.states(), cut, eps, cs);
  const Grid& g = *grid;
  r.initial_defect = detail::rel(l2_norm(g, r.u.states().col(0) - u0.values), l2_norm(g, u0.values));
  r.terminal_defect = detail::rel(l2_norm(g, r.u.states().col(nt) - u2.states().col(nt)), l2_norm(g, uT.values));
  for (int k = 0; k <= nt && u1.time(k) <= eps_prime; ++k)
    r.early_deviation = std::max(r.early_deviation, (r.u.states().col(k) - u1.states().col(k)).cwiseAbs().maxCoeff());
  return r;
}

inline constexpr double kMinWeightExponent = 1.0 / 3.0;

// Symmetric grid [-X, X] sharing the half-line grid's spacing; node n + 1 + j
// of the result is node j of the half-line grid, node n sits at 0.
inline GridPtr symmetric_extension(const Grid& half) {
  require(half.left() == 0, "symmetric_extension: half-line grid must start at 0");
  return build_interval_grid(-half.right(), half.right(), 2 * half.n() + 1);
}

// u(0) = u0 in L2(0, X); u(T) = uT in the e^{-2bx} weighted norm on (0, X).
// The corrector's control region must lie in x < 0 of the symmetric grid.
inline ConstructionResult theorem_1_2_trajectory(const StateVector& u0, const StateVector& uT, double b, double eps,
                                                 double T, int nt, const ControlSettings& cs) {
  if (!(b >= kMinWeightExponent - 1e-15))
    throw OutOfScope("theorem_1_2_trajectory: weight exponent b must be at least 1/3");
  require_same_grid(*u0.grid, *uT.grid);
  require(cs.omega.hi <= 0, "theorem_1_2_trajectory: control region must lie in x < 0");
  const Grid& half = *u0.grid;
  const int n = half.n();
  const GridPtr sym = symmetric_extension(half);
  const int m = sym->n();
  Vec e0 = Vec::Zero(m), e2 = Vec::Zero(m);
  for (int j = 0; j < n; ++j) {
    e0[n + 1 + j] = u0.values[j];
    e2[n - 1 - j] = uT.values[j];
  }
  const Trajectory u1 = evolve(build_operator(sym, OperatorKind::Forward), StateVector(e0, sym), 0.0, T, nt);
  const Trajectory u2 = evolve(build_operator(sym, OperatorKind::Weighted, b), StateVector(e2, sym), 0.0, T, nt);
  // Reflected and time-reversed branch: w(x, t) = u2(-x, T - t).
  const Mat u2r = u2.states().reverse();
  auto u2r_at = [&](double t) -> Vec { return u2.at(T - t).reverse(); };
  const CutoffFunction cut(eps, default_eps_prime(eps, T), T);
  ConstructionResult full = detail::assemble(u1, u2r_at, u2r, cut, eps, cs);

  ConstructionResult r = full;
  r.u = Trajectory(u0.grid, 0.0, T, full.u.states().bottomRows(n), full.u.scheme() + "+restricted");
  r.initial_defect = detail::rel(l2_norm(half, r.u.states().col(0) - u0.values), l2_norm(half, u0.values));
  r.terminal_defect = detail::rel(weighted_norm(half, r.u.states().col(nt) - uT.values, -2 * b),
                                  weighted_norm(half, uT.values, -2 * b));
  for (int k = 0; k <= nt && r.u.time(k) <= cut.eps_prime; ++k)
    r.early_deviation = std::max(
        r.early_deviation, (r.u.states().col(k) - u1.states().col(k).tail(n)).cwiseAbs().maxCoeff());
  return r;
}

}  // namespace kdvb
