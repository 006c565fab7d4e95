#include <gtest/gtest.h>

#include <Eigen/LU>

#include "kdvb/control.hpp"

using namespace kdvb;

namespace {
ControlProblem mode_problem(int n, double L, int nt) {
  ControlProblem p;
  p.grid = build_grid(L, n);
  p.T = 1;
  p.nt = nt;
  p.omega = {-L / 2, L / 2};
  p.u0 = dirichlet_mode(p.grid, 1).values;
  return p;
}

bool zero_off_mask(const ControlResult& r, const Grid& g, const Interval& om) {
  const Vec mask = region_mask(g, om);
  for (int i = 0; i < g.n(); ++i)
    if (mask[i] == 0 && (r.control.row(i).array() != 0).any()) return false;
  return true;
}
}  // namespace

TEST(NullControl, ZeroDataGivesZeroControl) {
  ControlProblem p = mode_problem(32, 2.0, 32);
  p.u0.setZero();
  const auto r = null_control(p);
  EXPECT_EQ(r.control.norm(), 0.0);
  EXPECT_EQ(r.endpoint_error, 0.0);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_TRUE(r.converged);
}

TEST(NullControl, FirstModeReachesTolerance) {
  const ControlProblem p = mode_problem(100, 2.0, 100);
  const auto r = null_control(p);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.endpoint_error, 1e-6);
  EXPECT_LE(r.iterations, 500);
  EXPECT_TRUE(zero_off_mask(r, *p.grid, p.omega));
  EXPECT_TRUE(std::isfinite(r.duality_gap));
  for (std::size_t k = 1; k < r.defect_history.size(); ++k)
    EXPECT_LE(r.defect_history[k], r.defect_history[k - 1] * (1 + 1e-12) + 1e-12) << "iteration " << k;
}

TEST(NullControl, MatchesDenseSaddleSolve) {
  ControlProblem p = mode_problem(32, 2.0, 32);
  p.tau = 1e-6;
  p.tol = 1e-13;
  p.max_iter = 400;
  const auto r = null_control(p);
  const Grid& g = *p.grid;
  const int n = g.n();
  // Endpoint map E over masked slot entries, built column by column.
  const Propagator Pf(build_operator(p.grid, OperatorKind::Forward), 0.0, p.T, p.nt);
  const Vec mask = region_mask(g, p.omega);
  std::vector<std::pair<int, int>> vars;
  for (int s = 0; s < Pf.slot_count(); ++s)
    for (int i = 0; i < n; ++i)
      if (mask[i] != 0) vars.push_back({s, i});
  const int m = static_cast<int>(vars.size());
  Mat E(n, m);
  Vec W(m);
  for (int c = 0; c < m; ++c) {
    Mat slots = Mat::Zero(n, Pf.slot_count());
    slots(vars[c].second, vars[c].first) = 1;
    E.col(c) = run_forward(Pf, Vec::Zero(n), &slots).states().col(p.nt);
    W[c] = Pf.stages()[vars[c].first].dt;
  }
  const Vec u_free = run_forward(Pf, p.u0).states().col(p.nt);
  // min 1/2 f'Wf + |u_free + E f|^2 / (4 tau'): stationarity in (f, lambda).
  const double tp = r.tau_effective;
  Mat K = Mat::Zero(m + n, m + n);
  K.topLeftCorner(m, m) = W.asDiagonal();
  K.topRightCorner(m, n) = E.transpose();
  K.bottomLeftCorner(n, m) = E;
  K.bottomRightCorner(n, n) = -2 * tp * Mat::Identity(n, n);
  Vec rhs = Vec::Zero(m + n);
  rhs.tail(n) = -u_free;
  const Vec sol = K.partialPivLu().solve(rhs);
  Vec f_cg(m);
  for (int c = 0; c < m; ++c) f_cg[c] = r.control(vars[c].second, vars[c].first);
  EXPECT_LE((f_cg - sol.head(m)).norm(), 1e-6 * sol.head(m).norm());
  EXPECT_LE(r.duality_gap, 1e-6);
}

TEST(NullControl, LinearInInitialData) {
  // Short budget: the Krylov iterates stay linear to roundoff.
  ControlProblem p = mode_problem(48, 2.0, 48);
  p.tol = 1e-300;
  p.max_iter = 5;
  const auto a = null_control(p);
  p.u0 *= 3.0;
  const auto b = null_control(p);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_LE((b.control - 3.0 * a.control).norm(), 1e-10 * b.control.norm());
}

TEST(NullControl, LinearAtModerateRegularization) {
  ControlProblem p = mode_problem(48, 2.0, 48);
  p.tau = 1e-3;
  p.tol = 1e-300;
  p.max_iter = 60;
  const auto a = null_control(p);
  p.u0 *= 0.3;
  const auto b = null_control(p);
  EXPECT_LE((b.control - 0.3 * a.control).norm(), 1e-10 * b.control.norm());
}

TEST(NullControl, RejectsBadProblems) {
  ControlProblem p = mode_problem(32, 2.0, 32);
  p.omega = {0.01, 0.02};
  EXPECT_THROW(null_control(p), InvalidArgument);
  p = mode_problem(32, 2.0, 32);
  p.tol = 0;
  EXPECT_THROW(null_control(p), InvalidArgument);
  p = mode_problem(32, 2.0, 32);
  p.uT = p.u0;
  EXPECT_THROW(null_control(p), InvalidArgument);
}

TEST(Steering, TargetEqualToStartNeedsNoControl) {
  ControlProblem p = mode_problem(48, 2.0, 48);
  p.uT = p.u0;
  const auto r = steering_control(p);
  EXPECT_LE(r.control_norm, 1e-8);
  EXPECT_LE(r.endpoint_error, 1e-12);
}

TEST(Steering, SwappedEndpointsBothConverge) {
  ControlProblem p = mode_problem(64, 2.0, 64);
  p.uT = dirichlet_mode(p.grid, 2).values;
  const auto fwd = steering_control(p);
  std::swap(p.u0, p.uT);
  const auto back = steering_control(p);
  EXPECT_TRUE(fwd.converged);
  EXPECT_TRUE(back.converged);
  EXPECT_TRUE(zero_off_mask(fwd, *p.grid, p.omega));
}

TEST(Cutoff, PlateausAndAnalyticSlope) {
  const CutoffFunction c(0.25, 0.6, 2.0);
  EXPECT_EQ(c(0.0), 1.0);
  EXPECT_EQ(c(0.6), 1.0);
  EXPECT_EQ(c(1.4), 0.0);
  EXPECT_EQ(c(2.0), 0.0);
  EXPECT_EQ(c.derivative(0.3), 0.0);
  for (double t : {0.7, 0.9, 1.0, 1.2, 1.35}) {
    const double h = 1e-6;
    EXPECT_NEAR(c.derivative(t), (c(t + h) - c(t - h)) / (2 * h), 1e-7);
  }
  EXPECT_NEAR(CutoffFunction::step(1.0), 1.0, 1e-14);
  // Fourth-order contact at both ends.
  for (double s : {1e-3, 1 - 1e-3}) EXPECT_LT(CutoffFunction::step_slope(s), 1e-9);
  EXPECT_THROW(CutoffFunction(0.7, 0.6, 2.0), InvalidArgument);
  EXPECT_THROW(CutoffFunction(0.25, 1.0, 2.0), InvalidArgument);
}

TEST(CompactSupport, ZeroSource) {
  auto g = build_grid(2.0, 48);
  SourceTerm f;
  f.t_a = 0.5;
  f.t_b = 1.0;
  const auto r = compact_support_source_solution(f, 0.25, g, 2.0, 64, {{-1.0, 1.0}});
  EXPECT_EQ(r.v.states().norm(), 0.0);
  EXPECT_EQ(r.source_norm, 0.0);
}

TEST(CompactSupport, BumpInTimeIsSwitchedOff) {
  auto g = build_grid(2.0, 64);
  SourceTerm f;
  f.t_a = 0.5;
  f.t_b = 1.0;
  f.evaluator = [g](double t) {
    const double s = std::sin(M_PI * (t - 0.5) / 0.5);
    return Vec(s * s * dirichlet_mode(g, 2).values);
  };
  const auto r = compact_support_source_solution(f, 0.3, g, 2.0, 128, {{-1.0, 1.0}, 1e-10, 1e-6, 500});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.decay_ratio, 1e-6);
  EXPECT_EQ(r.max_before_support, 0.0);
  EXPECT_TRUE(std::isfinite(r.constant));
  for (int k = r.k_control_end; k <= 128; ++k) EXPECT_LE(r.v.norms()[k], 1e-6 * r.v.norms()[r.k_forced_end]);
  EXPECT_THROW(compact_support_source_solution(f, 0.6, g, 2.0, 128, {{-1.0, 1.0}}), InvalidArgument);
}

TEST(CutoffConstruction, ZeroData) {
  auto g = build_grid(2.0, 32);
  const auto r = theorem_1_1_trajectory(StateVector::zero(g), StateVector::zero(g), 0.25, 0.6, 2.0, 64, {{-1.0, 1.0}});
  EXPECT_EQ(r.u.states().norm(), 0.0);
}

TEST(CutoffConstruction, EqualEndpointsNeedNoSource) {
  auto g = build_grid(2.0, 64);
  const auto u0 = dirichlet_mode(g, 1);
  const auto r = theorem_1_1_trajectory(u0, u0, 0.25, 0.6, 2.0, 128, {{-1.0, 1.0}});
  EXPECT_EQ(r.source_norm, 0.0);
  EXPECT_EQ(r.corrector.v.states().norm(), 0.0);
  const auto free = evolve(build_operator(g, OperatorKind::Forward), u0, 0.0, 2.0, 128);
  EXPECT_EQ((r.u.states() - free.states()).norm(), 0.0);
}

TEST(CutoffConstruction, OrthogonalModes) {
  auto g = build_grid(2.0, 64);
  const auto r = theorem_1_1_trajectory(dirichlet_mode(g, 1), dirichlet_mode(g, 2), 0.25, 0.6, 2.0, 128,
                                        {{-1.0, 1.0}, 1e-10, 1e-6, 500});
  EXPECT_EQ(r.initial_defect, 0.0);
  EXPECT_EQ(r.early_deviation, 0.0);
  EXPECT_LE(r.terminal_defect, 1e-4);
  EXPECT_GT(r.source_norm, 0.0);
}

TEST(HalfLineConstruction, RefusesSmallExponent) {
  auto g = build_interval_grid(0.0, 8.0, 32);
  EXPECT_THROW(theorem_1_2_trajectory(StateVector::zero(g), StateVector::zero(g), 0.2, 0.5, 4.0, 64, {{-6.0, -0.5}}),
               OutOfScope);
  EXPECT_THROW(theorem_1_2_trajectory(StateVector::zero(g), StateVector::zero(g), 0.5, 0.5, 4.0, 64, {{0.5, 6.0}}),
               InvalidArgument);
}

TEST(HalfLineConstruction, ZeroData) {
  auto g = build_interval_grid(0.0, 8.0, 32);
  const auto r = theorem_1_2_trajectory(StateVector::zero(g), StateVector::zero(g), 0.5, 0.5, 4.0, 64, {{-6.0, -0.5}});
  EXPECT_EQ(r.u.states().norm(), 0.0);
}

TEST(HalfLineConstruction, DefectsSmallAtThreshold) {
  auto g = build_interval_grid(0.0, 8.0, 128);
  const auto u0 = StateVector::sample(g, [](double x) { return x * x * std::exp(-x); });
  const auto uT = StateVector::sample(g, [](double x) { return std::sin(x) * x * std::exp(-0.5 * x); });
  const auto r = theorem_1_2_trajectory(u0, uT, 1.0 / 3.0, 1.5, 4.0, 256, {{-6.0, -0.16}, 1e-10, 1e-6, 2000});
  EXPECT_EQ(r.initial_defect, 0.0);
  EXPECT_LE(r.terminal_defect, 1e-3);
  EXPECT_EQ(r.u.grid()->n(), 128);
}
