#include <gtest/gtest.h>

#include "kdvb/carleman.hpp"

using namespace kdvb;

namespace {
const WeightPsi& unit_psi() {
  static const WeightPsi psi = build_psi(1.0, {-0.5, 0.5});
  return psi;
}
}  // namespace

TEST(WeightProfile, BoundarySlopesAndRatio) {
  const WeightPsi& psi = unit_psi();
  EXPECT_LT(psi(-1.0, 1), 0.0);
  EXPECT_GT(psi(1.0, 1), 0.0);
  EXPECT_LE(psi(-1.0) / psi(psi.l3()), 4.0 / 3.0);
  for (const auto& c : check_psi(psi)) EXPECT_TRUE(c.ok) << c.condition << ": " << c.detail;
  EXPECT_DOUBLE_EQ(psi.max_value(), psi(-1.0));
  EXPECT_DOUBLE_EQ(psi.min_value(), psi(0.0));
}

TEST(WeightProfile, ContinuousThroughThirdDerivative) {
  const WeightPsi& psi = unit_psi();
  for (double k : {-0.5, 0.0, 0.5})
    for (int d = 0; d <= 3; ++d) EXPECT_NEAR(psi(k - 1e-12, d), psi(k + 1e-12, d), 1e-9) << "knot " << k << " order " << d;
}

TEST(WeightProfile, AsymmetricOmega) {
  const WeightPsi psi = build_psi(2.0, {-1.5, 0.2});
  for (const auto& c : check_psi(psi)) EXPECT_TRUE(c.ok) << c.condition << ": " << c.detail;
  EXPECT_NEAR(psi(-2.0), psi(2.0), 1e-12);
}

TEST(WeightProfile, DegenerateOmegaNeverUnverified) {
  try {
    const WeightPsi psi = build_psi(1.0, {-0.999, 0.999});
    for (const auto& c : check_psi(psi)) EXPECT_TRUE(c.ok) << c.condition;
  } catch (const ConstructionFailure& e) {
    EXPECT_FALSE(e.condition().empty());
  }
}

TEST(WeightProfile, OmegaTouchingBoundaryFails) {
  try {
    build_psi(1.0, {-1.0, 0.5});
    FAIL() << "expected construction failure";
  } catch (const ConstructionFailure& e) {
    EXPECT_EQ(e.condition(), "omega inside (-L, L)");
  }
  EXPECT_THROW(build_psi(1.0, {-0.5, 1.0}), ConstructionFailure);
  EXPECT_THROW(build_psi(1.0, {0.3, 0.2}), ConstructionFailure);
}

TEST(Phi, ConstantProfile) {
  const CarlemanParams p{3.0, 1.0, WeightPsi::constant(1.0, 2.0)};
  const auto d = evaluate_phi(p, 0.3, 0.2);
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(d.x[k], 0.0);
  EXPECT_EQ(coefficient_bundle(p, 0.3, 0.2).closed.C, -1.0);
  const auto r = verify_weight_estimates(p, 1000);
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(r.C_fit[k], 0.0);
  EXPECT_EQ(r.max_violation, 0.0);
}

TEST(Phi, MidTime) {
  const CarlemanParams p{1.0, 2.0, unit_psi()};
  for (double x : {-1.0, -0.3, 0.0, 0.7}) EXPECT_NEAR(evaluate_phi(p, 1.0, x).x[0], 4 * unit_psi()(x) / 4.0, 1e-15);
}

TEST(Phi, FiniteDifferenceCrossCheck) {
  const CarlemanParams p{1.0, 1.0, unit_psi()};
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const double t = rng.uniform(0.1, 0.9), x = rng.uniform(-0.95, 0.95), h = 1e-5;
    const auto d = evaluate_phi(p, t, x);
    const double fx = (evaluate_phi(p, t, x + h).x[0] - evaluate_phi(p, t, x - h).x[0]) / (2 * h);
    const double ft = (evaluate_phi(p, t + h, x).x[0] - evaluate_phi(p, t - h, x).x[0]) / (2 * h);
    EXPECT_NEAR(fx, d.x[1], 1e-6 * std::max(1.0, std::abs(d.x[1])));
    EXPECT_NEAR(ft, d.t, 1e-6 * std::max(1.0, std::abs(d.t)));
  }
}

TEST(Phi, DomainErrors) {
  const CarlemanParams p{1.0, 1.0, unit_psi()};
  EXPECT_THROW(evaluate_phi(p, 0.0, 0.0), InvalidArgument);
  EXPECT_THROW(evaluate_phi(p, 1.0, 0.0), InvalidArgument);
  EXPECT_THROW(evaluate_phi({-1.0, 1.0, unit_psi()}, 0.5, 0.0), InvalidArgument);
}

TEST(Coefficients, DualPathAgreement) {
  Rng rng(11);
  double worst = 0;
  for (int i = 0; i < 300; ++i) {
    const CarlemanParams p{rng.uniform(0.1, 50), 1.0, unit_psi()};
    const auto b = coefficient_bundle(p, rng.uniform(0.01, 0.99), rng.uniform(-1, 1));
    worst = std::max(worst, b.max_relative_gap());
    EXPECT_NEAR(b.closed.D, b.lead + b.D1, 1e-13 * b.scale.D);
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Coefficients, CAndFIdentities) {
  const CarlemanParams p{4.0, 1.0, unit_psi()};
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(0.05, 0.95), x = rng.uniform(-1, 1);
    const auto d = evaluate_phi(p, t, x);
    const auto b = coefficient_bundle(p, t, x);
    EXPECT_NEAR(b.closed.C, 3 * p.s * d.x[1] - 1, 1e-15 * std::max(1.0, std::abs(b.closed.C)));
    EXPECT_NEAR(b.closed.F, -9 * p.s * d.x[2], 1e-12 * std::abs(b.closed.F));
    if (unit_psi()(x, 2) < 0) {
      EXPECT_GT(b.closed.F, 0.0);
    }
  }
}

TEST(Coefficients, BoundaryTermH) {
  const CarlemanParams p{2.5, 1.0, unit_psi()};
  for (double t : {0.1, 0.5, 0.8}) {
    const auto at_left = coefficient_bundle(p, t, -1.0);
    const double expected = -at_left.closed.C - 1;
    EXPECT_NEAR(at_left.closed.H, expected, 1e-12 * std::abs(expected));
    EXPECT_NEAR(at_left.automatic.H, expected, 1e-12 * std::abs(expected));
  }
}

TEST(WeightEstimates, NoViolationAndStableFit) {
  const CarlemanParams p{1.0, 1.0, unit_psi()};
  const auto r = verify_weight_estimates(p, 100000, 5);
  EXPECT_EQ(r.max_violation, 0.0);
  EXPECT_LE(r.K1_fit, r.K1_bound);
  const auto r2 = verify_weight_estimates(p, 200000, 5);
  EXPECT_LT(std::abs(r2.K2_fit - r.K2_fit) / r.K2_fit, 0.01);
}

TEST(Positivity, LeadingTermAndSStar) {
  const double T = 1.0;
  const auto rep = find_s_star(unit_psi(), T, 100, 100);
  EXPECT_GT(rep.s_star, 0.0);
  EXPECT_TRUE(rep.all_ok);
  for (const auto& sc : rep.scans) EXPECT_GT(sc.min_lead, 0.0);
  // Just below s* some scan fails.
  EXPECT_FALSE(scan_positivity({rep.s_star * 0.99, T, unit_psi()}, scan_mesh(unit_psi(), T, 100, 100)).ok);
}

namespace {
Trajectory free_run(const StateVector& u0, double T, int nt) {
  return evolve(build_operator(u0.grid, OperatorKind::Forward), u0, 0.0, T, nt);
}
}  // namespace

TEST(CarlemanRatio, ZeroDataNotApplicable) {
  auto g = build_grid(1.0, 64);
  const CarlemanParams p{2.0, 1.0, unit_psi()};
  const auto tr = free_run(StateVector::zero(g), 1.0, 50);
  EXPECT_FALSE(carleman_ratio(tr, p).applicable);
  EXPECT_FALSE(weighted_observability_ineq(tr, p).ratio.applicable);
}

TEST(CarlemanRatio, ScaleInvariantAndFinite) {
  auto g = build_grid(1.0, 64);
  Rng rng(2);
  const auto u0 = random_state(g, rng);
  StateVector u5 = u0;
  u5.values *= 5;
  const CarlemanParams p{2.0, 1.0, unit_psi()};
  const auto a = carleman_ratio(free_run(u0, 1.0, 64), p);
  const auto b = carleman_ratio(free_run(u5, 1.0, 64), p);
  ASSERT_TRUE(a.applicable);
  EXPECT_TRUE(std::isfinite(a.ratio));
  EXPECT_GE(a.ratio, 1.0);
  EXPECT_NEAR(b.ratio / a.ratio, 1.0, 1e-10);
}

TEST(CarlemanRatio, MismatchedDomain) {
  auto g = build_grid(2.0, 32);
  const CarlemanParams p{2.0, 1.0, unit_psi()};
  EXPECT_THROW(carleman_ratio(free_run(StateVector::zero(g), 1.0, 10), p), InvalidArgument);
}

TEST(WeightedObservability, HatBelowFourThirds) {
  auto g = build_grid(1.0, 64);
  Rng rng(4);
  const CarlemanParams p{2.0, 1.0, unit_psi()};
  const auto r = weighted_observability_ineq(free_run(random_state(g, rng), 1.0, 64), p);
  ASSERT_TRUE(r.ratio.applicable);
  EXPECT_TRUE(std::isfinite(r.ratio.ratio));
  EXPECT_LT(r.max_hat_over_check, 4.0 / 3.0);
}
