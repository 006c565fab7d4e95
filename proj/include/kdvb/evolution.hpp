#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kdvb/band_matrix.hpp"
#include "kdvb/operator.hpp"
#include "kdvb/sobolev.hpp"

namespace kdvb {

// One implicit sub-step. Crank-Nicolson stages span a whole macro step; the
// first two macro steps are each split into two backward-Euler halves so that
// stiff boundary modes are damped (Rannacher startup).
struct Stage {
  double dt;
  bool backward_euler;
  double t_mid;
  int macro;
};

inline constexpr int kStartupMacroSteps = 2;

inline std::vector<Stage> stage_schedule(double t0, double T, int nt) {
  require(nt >= 1, "evolve: nt must be >= 1");
  require(std::isfinite(t0) && std::isfinite(T) && T > t0, "evolve: need T > t0");
  const double dt = (T - t0) / nt;
  std::vector<Stage> st;
  for (int k = 0; k < nt; ++k) {
    const double tk = t0 + k * dt;
    if (k < kStartupMacroSteps) {
      st.push_back({0.5 * dt, true, tk + 0.25 * dt, k});
      st.push_back({0.5 * dt, true, tk + 0.75 * dt, k});
    } else {
      st.push_back({dt, false, tk + 0.5 * dt, k});
    }
  }
  return st;
}

// Factored step matrix I - dt/2 A, shared by both stage types.
class Propagator {
 public:
  Propagator(const DiscreteOperator& op, double t0, double T, int nt)
      : op_(op), t0_(t0), T_(T), nt_(nt), stages_(stage_schedule(t0, T, nt)), dt_((T - t0) / nt),
        lu_(op.matrix.affine(1.0, -0.5 * dt_)) {}

  const std::vector<Stage>& stages() const { return stages_; }
  int slot_count() const { return static_cast<int>(stages_.size()); }
  double dt() const { return dt_; }
  double t0() const { return t0_; }
  double T() const { return T_; }
  int nt() const { return nt_; }
  const DiscreteOperator& op() const { return op_; }

  // u <- M_s u + dt_s K_s f, K_s = (I - dt/2 A)^{-1}.
  void forward_stage(int s, Eigen::Ref<Vec> u, const Vec* f = nullptr) const {
    const Stage& st = stages_[s];
    if (!st.backward_euler) u += 0.5 * dt_ * op_.apply(u);
    if (f) u += st.dt * (*f);
    lu_.solve_in_place(u);
  }

  void forward_stage_block(int s, Eigen::Ref<Mat> U) const {
    for (Eigen::Index c = 0; c < U.cols(); ++c) forward_stage(s, U.col(c));
  }

  // Transposed stage run with the adjoint operator's own factorization:
  // phi holds the state after the stage on entry and before it on exit;
  // slot receives K_s^T phi_after, the value paired with the source slot.
  void adjoint_stage(int s, Eigen::Ref<Vec> phi, Vec* slot = nullptr) const {
    Vec y = phi;
    lu_.solve_in_place(y);
    if (slot) *slot = y;
    if (stages_[s].backward_euler)
      phi = y;
    else
      phi = 2 * y - phi;
  }

 private:
  DiscreteOperator op_;
  double t0_, T_;
  int nt_;
  std::vector<Stage> stages_;
  double dt_;
  BandedLU lu_;
};

class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(GridPtr grid, double t0, double T, Mat states, std::string scheme)
      : grid_(std::move(grid)), t0_(t0), T_(T), states_(std::move(states)), scheme_(std::move(scheme)) {
    require(states_.cols() >= 2, "trajectory: need at least two states");
    require(states_.rows() == grid_->n(), "trajectory: state length does not match grid");
    dt_ = (T_ - t0_) / (states_.cols() - 1);
    norms_.resize(states_.cols());
    for (Eigen::Index k = 0; k < states_.cols(); ++k) norms_[k] = l2_norm(*grid_, states_.col(k));
  }

  const GridPtr& grid() const { return grid_; }
  double t0() const { return t0_; }
  double T() const { return T_; }
  double dt() const { return dt_; }
  int steps() const { return static_cast<int>(states_.cols()) - 1; }
  double time(int k) const { return t0_ + k * dt_; }
  const Mat& states() const { return states_; }
  Vec values(int k) const { return states_.col(k); }
  StateVector state(int k) const { return StateVector(states_.col(k), grid_); }
  const Vec& norms() const { return norms_; }
  const std::string& scheme() const { return scheme_; }

  // Piecewise-linear in time between stored states.
  Vec at(double t) const {
    const double r = (t - t0_) / dt_;
    int k = static_cast<int>(std::floor(r));
    k = std::max(0, std::min(k, steps() - 1));
    const double a = std::min(1.0, std::max(0.0, r - k));
    return (1 - a) * states_.col(k) + a * states_.col(k + 1);
  }

  // Trapezoid in time of a per-state quantity.
  double time_integral(const Vec& per_state) const {
    double s = 0;
    for (int k = 0; k < steps(); ++k) s += 0.5 * dt_ * (per_state[k] + per_state[k + 1]);
    return s;
  }

 private:
  GridPtr grid_;
  double t0_ = 0, T_ = 0, dt_ = 0;
  Mat states_;
  Vec norms_;
  std::string scheme_;
};

inline constexpr const char* kSchemeTag = "crank-nicolson+2be-startup";

struct SourceTerm {
  std::function<Vec(double)> evaluator;
  double t_a = -std::numeric_limits<double>::infinity();
  double t_b = std::numeric_limits<double>::infinity();

  bool active(double t) const { return t >= t_a && t <= t_b; }
  Vec operator()(double t, const Grid& g) const {
    if (!evaluator || !active(t)) return Vec::Zero(g.n());
    Vec v = evaluator(t);
    require(v.size() == g.n(), "source: wrong length");
    return v;
  }

  // Largest |f| the raw evaluator returns outside [t_a, t_b] on a uniform sample.
  double support_violation(const Grid& g, double t0, double T, int samples) const {
    double worst = 0;
    if (!evaluator) return 0;
    for (int k = 0; k <= samples; ++k) {
      const double t = t0 + (T - t0) * k / samples;
      if (active(t)) continue;
      Vec v = evaluator(t);
      if (v.size() == g.n()) worst = std::max(worst, v.cwiseAbs().maxCoeff());
    }
    return worst;
  }
};

// Source values at the stage midpoints, one column per slot.
inline Mat sample_slots(const SourceTerm& f, const Grid& g, const std::vector<Stage>& stages) {
  Mat S(g.n(), stages.size());
  for (std::size_t s = 0; s < stages.size(); ++s) S.col(s) = f(stages[s].t_mid, g);
  return S;
}

// Forward run with optional per-slot forcing (nullptr = homogeneous).
inline Trajectory run_forward(const Propagator& P, const Vec& u0, const Mat* slots = nullptr) {
  const int n = P.op().n();
  require(u0.size() == n, "evolve: initial state length does not match operator");
  if (slots) require(slots->rows() == n && slots->cols() == P.slot_count(), "evolve: slot forcing has wrong shape");
  Mat states(n, P.nt() + 1);
  states.col(0) = u0;
  Vec u = u0;
  Vec f;
  const auto& st = P.stages();
  for (int s = 0; s < P.slot_count(); ++s) {
    if (slots) f = slots->col(s);
    P.forward_stage(s, u, slots ? &f : nullptr);
    if (s + 1 == P.slot_count() || st[s + 1].macro != st[s].macro) states.col(st[s].macro + 1) = u;
  }
  if (!states.allFinite()) throw NumericalBreakdown("evolve: non-finite state");
  return Trajectory(P.op().grid, P.t0(), P.T(), std::move(states), kSchemeTag);
}

inline void require_evolvable(const DiscreteOperator& op, const StateVector& u0) {
  require(op.kind != OperatorKind::Adjoint, "evolve: use evolve_adjoint for the adjoint operator");
  require_same_grid(*op.grid, *u0.grid);
}

inline Trajectory evolve(const DiscreteOperator& op, const StateVector& u0, double t0, double T, int nt) {
  require_evolvable(op, u0);
  return run_forward(Propagator(op, t0, T, nt), u0.values);
}

inline Trajectory evolve_forced(const DiscreteOperator& op, const StateVector& u0, const SourceTerm& f, double t0,
                                double T, int nt) {
  require_evolvable(op, u0);
  Propagator P(op, t0, T, nt);
  const Mat slots = sample_slots(f, *op.grid, P.stages());
  return run_forward(P, u0.values, &slots);
}

struct AdjointRun {
  Trajectory trajectory;  // state k sits at time t0 + k dt
  Mat slot_values;        // pairing value per forward slot
  std::vector<Stage> stages;
};

// Backward run from phi_T using the adjoint operator's factorization.
inline AdjointRun run_adjoint(const Propagator& P, const Vec& phiT) {
  const int n = P.op().n();
  require(phiT.size() == n, "evolve_adjoint: terminal state length does not match operator");
  Mat states(n, P.nt() + 1);
  Mat slots(n, P.slot_count());
  states.col(P.nt()) = phiT;
  Vec phi = phiT, y;
  const auto& st = P.stages();
  for (int s = P.slot_count() - 1; s >= 0; --s) {
    P.adjoint_stage(s, phi, &y);
    slots.col(s) = y;
    if (s == 0 || st[s - 1].macro != st[s].macro) states.col(st[s].macro) = phi;
  }
  if (!states.allFinite()) throw NumericalBreakdown("evolve_adjoint: non-finite state");
  return {Trajectory(P.op().grid, P.t0(), P.T(), std::move(states), kSchemeTag), std::move(slots), st};
}

inline AdjointRun evolve_adjoint_run(const DiscreteOperator& op, const StateVector& phiT, double t0, double T, int nt) {
  require(op.kind == OperatorKind::Adjoint, "evolve_adjoint: needs the adjoint operator");
  require_same_grid(*op.grid, *phiT.grid);
  return run_adjoint(Propagator(op, t0, T, nt), phiT.values);
}

inline Trajectory evolve_adjoint(const DiscreteOperator& op, const StateVector& phiT, double t0, double T, int nt) {
  return evolve_adjoint_run(op, phiT, t0, T, nt).trajectory;
}

// Sum over slots of dt_s (f_s, p_s)_h.
inline double slot_pairing(const Grid& g, const std::vector<Stage>& stages, const Mat& f, const Mat& p) {
  double s = 0;
  for (std::size_t k = 0; k < stages.size(); ++k) s += stages[k].dt * f.col(k).dot(p.col(k));
  return g.h() * s;
}

inline double max_step_ratio(const Trajectory& tr) {
  double r = 0;
  for (int k = 0; k < tr.steps(); ++k) {
    if (tr.norms()[k] == 0) {
      r = std::max(r, tr.norms()[k + 1] == 0 ? 1.0 : std::numeric_limits<double>::infinity());
      continue;
    }
    r = std::max(r, tr.norms()[k + 1] / tr.norms()[k]);
  }
  return r;
}

// ---------------------------------------------------------------- smoothing

struct GainReport {
  bool applicable = false;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double source_norm = 0;    // ||f||_{X}
  double solution_norm = 0;  // ||u||_{L2 H^a} + sup_t ||u||_{H^b}
  double solution_l2_part = 0, solution_sup_part = 0;
};

struct GainSpaces {
  double source_order, solution_l2_order, solution_sup_order;
};

inline GainSpaces gain_spaces(double theta) {
  if (std::abs(theta - 0.25) < 1e-12) return {-1.0, 1.0, 0.0};
  if (std::abs(theta - 0.5) < 1e-12) return {0.0, 2.0, 1.0};
  if (std::abs(theta - 1.0) < 1e-12) return {2.0, 4.0, 3.0};
  throw InvalidArgument("smoothing_gain: theta must be 1/4, 1/2 or 1");
}

// Ratio of solution to source norms for u0 = 0.
inline GainReport smoothing_gain_slots(double theta, const Propagator& P, const Mat& slots) {
  const GainSpaces sp = gain_spaces(theta);
  const Grid& g = *P.op().grid;
  const DirichletSpectrum spec(g);
  GainReport r;
  const Vec fn = sobolev_squared_norms(g, slots, sp.source_order, &spec);
  for (int s = 0; s < P.slot_count(); ++s) r.source_norm += P.stages()[s].dt * fn[s];
  r.source_norm = std::sqrt(r.source_norm);
  const Trajectory u = run_forward(P, Vec::Zero(g.n()), &slots);
  r.solution_l2_part = std::sqrt(u.time_integral(sobolev_squared_norms(g, u.states(), sp.solution_l2_order, &spec)));
  r.solution_sup_part = std::sqrt(sobolev_squared_norms(g, u.states(), sp.solution_sup_order, &spec).maxCoeff());
  r.solution_norm = r.solution_l2_part + r.solution_sup_part;
  r.applicable = r.source_norm > 0;
  if (r.applicable) r.ratio = r.solution_norm / r.source_norm;
  return r;
}

inline GainReport smoothing_gain(double theta, const SourceTerm& f, GridPtr grid, double T, int nt) {
  gain_spaces(theta);
  const DiscreteOperator op = build_operator(grid, OperatorKind::Forward);
  Propagator P(op, 0.0, T, nt);
  return smoothing_gain_slots(theta, P, sample_slots(f, *grid, P.stages()));
}

// ------------------------------------------------------------ weighted flow

inline double weighted_norm(const Grid& g, const Vec& u, double exponent) {
  double s = 0;
  for (int i = 0; i < g.n(); ++i) s += std::exp(exponent * g.x(i)) * u[i] * u[i];
  return std::sqrt(g.h() * s);
}

// Truncation length at which the e^{-2bx} tail drops below 1e-12.
inline double half_line_length(double b) {
  require(b > 0, "half_line_length: b must be positive");
  return std::log(1e12) / (2 * b);
}

inline GridPtr half_line_grid(double b, int n) { return build_interval_grid(0.0, half_line_length(b), n); }

struct WeightedContractionReport {
  double b = 0;
  double max_ratio_growth_weight = 1;  // e^{2bx} norm, the contraction claim
  double max_ratio_decay_weight = 1;   // e^{-2bx} norm, reported only
  Vec growth_weight_norms, decay_weight_norms;
};

inline WeightedContractionReport weighted_contraction_check(double b, const StateVector& u0, double T, int nt) {
  if (!(b >= 0)) throw InvalidArgument("weighted_contraction_check: b must be >= 0");
  const GridPtr& g = u0.grid;
  const DiscreteOperator op = build_operator(g, OperatorKind::Weighted, b);
  const Trajectory tr = evolve(op, u0, 0.0, T, nt);
  WeightedContractionReport r;
  r.b = b;
  r.growth_weight_norms.resize(tr.steps() + 1);
  r.decay_weight_norms.resize(tr.steps() + 1);
  for (int k = 0; k <= tr.steps(); ++k) {
    r.growth_weight_norms[k] = weighted_norm(*g, tr.states().col(k), 2 * b);
    r.decay_weight_norms[k] = weighted_norm(*g, tr.states().col(k), -2 * b);
  }
  auto worst = [](const Vec& v) {
    double m = 0;
    for (Eigen::Index k = 0; k + 1 < v.size(); ++k) m = std::max(m, v[k] > 0 ? v[k + 1] / v[k] : 1.0);
    return m;
  };
  r.max_ratio_growth_weight = worst(r.growth_weight_norms);
  r.max_ratio_decay_weight = worst(r.decay_weight_norms);
  return r;
}

}  // namespace kdvb
