#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "kdvb/operator.hpp"
#include "kdvb/rng.hpp"
#include "kdvb/sobolev.hpp"

using namespace kdvb;

TEST(Grid, UniformMeshArithmetic) {
  auto g = build_grid(1.0, 9);
  EXPECT_NEAR(g->h(), 0.2, 1e-15);
  EXPECT_NEAR(g->x(0), -0.8, 1e-15);
  EXPECT_NEAR(build_grid(30.0, 299)->h(), 0.2, 1e-13);
  for (int i = 0; i + 1 < g->n(); ++i) EXPECT_LT(g->x(i), g->x(i + 1));
  EXPECT_GT(g->x(0), -1.0);
  EXPECT_LT(g->x(g->n() - 1), 1.0);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(build_grid(1.0, 4), InvalidArgument);
  EXPECT_THROW(build_grid(0.0, 16), InvalidArgument);
  EXPECT_THROW(build_grid(-1.0, 16), InvalidArgument);
}

TEST(InnerProduct, Basics) {
  auto g = build_grid(1.0, 9);
  Rng rng(1);
  const auto v = random_state(g, rng);
  EXPECT_EQ(inner_product(StateVector::zero(g), v), 0.0);
  const auto one = StateVector::sample(g, [](double) { return 1.0; });
  EXPECT_NEAR(inner_product(one, one), 2.0, 2 * g->h());
  EXPECT_THROW(inner_product(v, StateVector::zero(build_grid(1.0, 10))), InvalidArgument);
}

TEST(InnerProduct, MatchesDirectSummation) {
  auto g = build_grid(1.0, 8);
  Rng rng(2);
  const auto u = random_state(g, rng), v = random_state(g, rng);
  double s = 0;
  for (int i = 0; i < 8; ++i) s += u.values[i] * v.values[i];
  s *= 2.0 / 9.0;
  EXPECT_NEAR(inner_product(u, v), s, 1e-14 * std::max(1.0, std::abs(s)));
}

class DissipativityOnGrids : public ::testing::TestWithParam<int> {};

TEST_P(DissipativityOnGrids, QuadraticFormsNonPositive) {
  auto g = build_grid(1.0, GetParam());
  const auto A = build_operator(g, OperatorKind::Forward);
  const auto As = build_operator(g, OperatorKind::Adjoint);
  Rng rng(GetParam());
  for (int t = 0; t < 50; ++t) {
    const auto u = random_state(g, rng);
    const double nn = inner_product(u, u);
    EXPECT_LE(inner_product(StateVector(A.apply(u.values), g), u), 1e-12 * nn);
    EXPECT_LE(inner_product(StateVector(As.apply(u.values), g), u), 1e-12 * nn);
  }
}

TEST_P(DissipativityOnGrids, AdjointConsistency) {
  auto g = build_grid(2.0, GetParam());
  const auto A = build_operator(g, OperatorKind::Forward);
  const auto As = build_operator(g, OperatorKind::Adjoint);
  Rng rng(7 + GetParam());
  for (int t = 0; t < 20; ++t) {
    const auto u = random_state(g, rng), v = random_state(g, rng);
    const double lhs = inner_product(StateVector(A.apply(u.values), g), v);
    const double rhs = inner_product(u, StateVector(As.apply(v.values), g));
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * l2_norm(u) * l2_norm(v));
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, DissipativityOnGrids, ::testing::Values(8, 16, 33, 128, 300));

TEST(Operator, DenseSpectrumInLeftHalfPlane) {
  auto g = build_grid(1.0, 16);
  const Mat A = build_operator(g, OperatorKind::Forward).matrix.to_dense();
  Eigen::EigenSolver<Mat> es(A);
  EXPECT_LE(es.eigenvalues().real().maxCoeff(), 0.0);
}

TEST(Operator, BandwidthKindAndDeterminism) {
  auto g = build_grid(1.0, 40);
  for (auto k : {OperatorKind::Forward, OperatorKind::Adjoint}) {
    const auto a = build_operator(g, k), b = build_operator(g, k);
    EXPECT_LE(a.matrix.width(), 7);
    EXPECT_TRUE(a.matrix == b.matrix);
    EXPECT_EQ(a.kind, k);
  }
  EXPECT_EQ(build_operator(g, OperatorKind::Forward).closure, BoundaryClosure::DirichletBoth_SlopeRight);
  EXPECT_EQ(build_operator(g, OperatorKind::Adjoint).closure, BoundaryClosure::DirichletBoth_SlopeLeft);
  EXPECT_THROW(build_operator(g, OperatorKind::Weighted), InvalidArgument);
  EXPECT_THROW(build_operator(g, OperatorKind::Weighted, -0.1), InvalidArgument);
}

TEST(Operator, AdjointIsExactTransposeOfForward) {
  auto g = build_grid(1.0, 20);
  const Mat A = build_operator(g, OperatorKind::Forward).matrix.to_dense();
  const Mat As = build_operator(g, OperatorKind::Adjoint).matrix.to_dense();
  EXPECT_LE((A.transpose() - As).cwiseAbs().maxCoeff(), 1e-12 * A.cwiseAbs().maxCoeff());
}

TEST(Operator, ForwardStencilOnCubicMatchesAnalyticDerivatives) {
  // Interior rows reproduce u_xx - u_xxx exactly on a cubic.
  auto g = build_grid(1.0, 40);
  const auto A = build_operator(g, OperatorKind::Forward);
  auto u = StateVector::sample(g, [](double x) { return x * x * x + 0.5 * x * x; });
  const Vec Au = A.apply(u.values);
  for (int i = 2; i < g->n() - 3; ++i) {
    const double x = g->x(i);
    EXPECT_NEAR(Au[i], (6 * x + 1) - 6, 1e-7);
  }
}

namespace {
// Largest eigenvalue of the symmetric part of E B E^{-1}, E = diag(e^{bx}).
double weighted_numerical_abscissa(double b) {
  auto g = build_interval_grid(0.0, 6.0, 120);
  const Mat B = build_operator(g, OperatorKind::Weighted, b).matrix.to_dense();
  Mat C = B;
  for (int i = 0; i < g->n(); ++i)
    for (int j = 0; j < g->n(); ++j) C(i, j) = B(i, j) * std::exp(b * (g->x(i) - g->x(j)));
  const Mat S = 0.5 * (C + C.transpose());
  return Eigen::SelfAdjointEigenSolver<Mat>(S).eigenvalues().maxCoeff() / S.cwiseAbs().maxCoeff();
}
}  // namespace

TEST(WeightedOperator, DissipativeInGrowthWeightForAdmissibleExponents) {
  for (double b : {1.0 / 3, 0.5, 0.75, 1.0}) EXPECT_LE(weighted_numerical_abscissa(b), 1e-12) << "b=" << b;
}

TEST(WeightedOperator, NotDissipativeOutsideAdmissibleRange) {
  EXPECT_GT(weighted_numerical_abscissa(0.1), 0.0);
  EXPECT_GT(weighted_numerical_abscissa(2.0), 0.0);
}

TEST(DissipativityResidual, ZeroState) {
  auto g = build_grid(1.0, 16);
  EXPECT_EQ(dissipativity_residual(build_operator(g, OperatorKind::Forward), StateVector::zero(g)), 0.0);
  EXPECT_THROW(dissipativity_residual(build_operator(g, OperatorKind::Adjoint), StateVector::zero(g)), InvalidArgument);
}

TEST(DissipativityResidual, MatchesDenseEvaluation) {
  auto g = build_grid(1.0, 8);
  Rng rng(3);
  const auto u = random_state(g, rng);
  const Mat A = build_operator(g, OperatorKind::Forward).matrix.to_dense();
  const double h = g->h();
  Mat G = Mat::Zero(9, 8);  // forward differences of (0,u,0)
  for (int r = 0; r < 9; ++r) {
    if (r < 8) G(r, r) += 1 / h;
    if (r > 0) G(r, r - 1) -= 1 / h;
  }
  const Vec& x = u.values;
  const double expect = h * x.dot(A * x) + h * (G * x).squaredNorm() + 0.5 * std::pow(x[0] / h, 2);
  const double got = dissipativity_residual(build_operator(g, OperatorKind::Forward), u);
  EXPECT_NEAR(got, expect, 1e-13 * std::max(1.0, h * (G * x).squaredNorm()));
}

namespace {
// Summation-by-parts oracle: the defect equals the numerical dissipation of
// the biased stencil, -(h/2)||D+D-u||^2 - (D-u at the right end)^2 / 2.
double residual_by_parts(const Grid& g, const Vec& u) {
  const int n = g.n();
  const double h = g.h();
  Vec e = Vec::Zero(n + 2);
  e.segment(1, n) = u;
  double w2 = 0;
  for (int i = 1; i <= n; ++i) w2 += std::pow((e[i + 1] - 2 * e[i] + e[i - 1]) / (h * h), 2);
  const double dn = -u[n - 1] / h;
  return -0.5 * h * h * w2 - 0.5 * dn * dn;
}
}  // namespace

TEST(DissipativityResidual, EqualsSummationByPartsDefect) {
  for (int n : {8, 37, 200}) {
    auto g = build_grid(1.7, n);
    Rng rng(n);
    const auto u = random_state(g, rng);
    const double r = dissipativity_residual(build_operator(g, OperatorKind::Forward), u);
    EXPECT_NEAR(r, residual_by_parts(*g, u.values), 1e-11 * std::abs(r));
  }
}

TEST(DissipativityResidual, FirstOrderBoundOnSmoothFieldInDomain) {
  // sin(pi(x+1)/2)(1-x)/2 satisfies u(+-1) = u_x(1) = 0; |r| <= h/2 int u_xx^2 + O(h^2).
  auto f = [](double x) { return std::sin(M_PI * (x + 1) / 2) * (1 - x) / 2; };
  auto fxx = [](double x) {
    const double a = M_PI / 2, y = a * (x + 1);
    return -a * a * std::sin(y) * (1 - x) / 2 - a * std::cos(y);
  };
  double integral = 0;
  const int m = 20000;
  for (int k = 0; k < m; ++k) integral += std::pow(fxx(-1 + (k + 0.5) * 2.0 / m), 2) * 2.0 / m;
  for (int n : {64, 128, 256, 512}) {
    auto g = build_grid(1.0, n);
    const auto u = StateVector::sample(g, f);
    const double r = std::abs(dissipativity_residual(build_operator(g, OperatorKind::Forward), u));
    EXPECT_LE(r, 0.5 * g->h() * integral * (1 + 4 * g->h()));
    EXPECT_GE(r, 0.5 * g->h() * integral * (1 - 4 * g->h()));
  }
}

TEST(Sobolev, OrderZeroIsL2) {
  auto g = build_grid(1.0, 33);
  Rng rng(4);
  const auto u = random_state(g, rng);
  EXPECT_NEAR(discrete_sobolev_norm(u, 0.0), std::sqrt(inner_product(u, u)), 1e-12 * l2_norm(u));
}

TEST(Sobolev, OrderOneMatchesForwardDifferenceEnergy) {
  // -D2 = G^T G, so the spectral H^1 seminorm is the discrete Dirichlet energy.
  auto g = build_grid(1.5, 40);
  Rng rng(5);
  const auto u = random_state(g, rng);
  EXPECT_NEAR(std::pow(discrete_sobolev_norm(u, 1.0), 2), forward_difference_energy(*g, u.values),
              1e-10 * forward_difference_energy(*g, u.values));
}

TEST(Sobolev, FirstModeRatioApproachesContinuumEigenvalue) {
  const double L = 1.3;
  double prev = 1e9;
  for (int n : {32, 128, 512}) {
    auto g = build_grid(L, n);
    const auto u = dirichlet_mode(g, 1);
    const double err = std::abs(discrete_sobolev_norm(u, 1.0) / discrete_sobolev_norm(u, 0.0) - M_PI / (2 * L));
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(Sobolev, DualPairIdentityOnEigenmode) {
  auto g = build_grid(1.0, 50);
  const auto u = dirichlet_mode(g, 1);
  const double lhs = discrete_sobolev_norm(u, -1.0) * discrete_sobolev_norm(u, 1.0);
  EXPECT_NEAR(lhs, std::pow(discrete_sobolev_norm(u, 0.0), 2), 1e-12);
}

TEST(Sobolev, UnsupportedOrderRejected) {
  auto g = build_grid(1.0, 16);
  EXPECT_THROW(discrete_sobolev_norm(StateVector::zero(g), 0.5), InvalidArgument);
  for (double s : kSobolevOrders) EXPECT_NO_THROW(discrete_sobolev_norm(StateVector::zero(g), s));
}

TEST(Sobolev, FractionalScaleIsMonotone) {
  auto g = build_grid(1.0, 64);
  Rng rng(6);
  const auto u = random_state(g, rng);
  double prev = 0;
  for (double s : kSobolevOrders) {
    if (uses_difference_norm(s)) continue;
    const double v = discrete_sobolev_norm(u, s);
    EXPECT_GT(v, prev);
    prev = v;
  }
}
