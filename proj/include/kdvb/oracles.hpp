#pragma once

// Dense reference computations for small grids. Each one avoids the fast
// path it is compared against.

#include <unsupported/Eigen/MatrixFunctions>

#include "kdvb/control.hpp"
#include "kdvb/observability.hpp"

namespace kdvb {

// exp(T A) u0 by dense Pade scaling and squaring.
inline Vec expm_endpoint(const DiscreteOperator& op, const Vec& u0, double T) {
  require(op.n() <= 400, "expm_endpoint: dense oracle limited to n <= 400");
  const Mat A = op.matrix.to_dense() * T;
  return A.exp() * u0;
}

struct DenseObservability {
  double C_obs = 0;
  Mat G_full, G_omega;
};

// Gramians from explicit stage matrices, then the Cholesky-reduced standard
// symmetric eigenproblem.
inline DenseObservability dense_observability(const GridPtr& g, double T, int nt, const Interval& omega,
                                              double tau) {
  const int n = g->n();
  require(n <= 400, "dense_observability: dense oracle limited to n <= 400");
  const Mat A = build_operator(g, OperatorKind::Forward).matrix.to_dense();
  const Mat I = Mat::Identity(n, n);
  const double dt = T / nt;
  const Mat K = (I - 0.5 * dt * A).inverse();
  const Mat cn = K * (I + 0.5 * dt * A), be = K * K;
  const Vec mask = region_mask(*g, omega);
  Mat Phi = I;
  DenseObservability r;
  r.G_full = Mat::Zero(n, n);
  r.G_omega = Mat::Zero(n, n);
  for (int k = 0; k <= nt; ++k) {
    if (k > 0) Phi = (k <= kStartupMacroSteps ? be : cn) * Phi;
    const double w = (k == 0 || k == nt ? 0.5 : 1.0) * dt * g->h();
    r.G_full += w * Phi.transpose() * Phi;
    r.G_omega += w * Phi.transpose() * mask.asDiagonal() * Phi;
  }
  Mat B = r.G_omega;
  B.diagonal().array() += tau * r.G_full.trace() / n;
  const Eigen::LLT<Mat> L(B);
  if (L.info() != Eigen::Success) throw NumericalBreakdown("dense_observability: observed form is not positive definite");
  const Mat Li = L.matrixL().solve(I);
  const Mat S = Li * r.G_full * Li.transpose();
  const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  r.C_obs = std::sqrt(es.eigenvalues().maxCoeff());
  return r;
}

// Regularized null control from the full KKT system
//   [W  E^T      ] [f]   [0      ]
//   [E  -2 tau' I] [l] = [-u_free]
// over the masked slot entries, E the endpoint map built column by column.
inline Mat dense_null_control(const ControlProblem& p) {
  validate(p);
  const Grid& g = *p.grid;
  const int n = g.n();
  const Propagator Pf(build_operator(p.grid, OperatorKind::Forward), p.t0, p.T, p.nt);
  const Vec mask = region_mask(g, p.omega);
  std::vector<std::pair<int, int>> vars;
  for (int s = 0; s < Pf.slot_count(); ++s)
    for (int i = 0; i < n; ++i)
      if (mask[i] != 0) vars.push_back({s, i});
  const int m = static_cast<int>(vars.size());
  require(m + n <= 6000, "dense_null_control: system too large for the dense oracle");
  Mat E(n, m);
  Vec W(m);
  for (int c = 0; c < m; ++c) {
    Mat slots = Mat::Zero(n, Pf.slot_count());
    slots(vars[c].second, vars[c].first) = 1;
    E.col(c) = run_forward(Pf, Vec::Zero(n), &slots).states().col(p.nt);
    W[c] = Pf.stages()[vars[c].first].dt;
  }
  const Vec u_free = run_forward(Pf, p.u0).states().col(p.nt);
  const double tp = p.tau * (p.T - p.t0) * mask_count(mask) / n;
  Mat K = Mat::Zero(m + n, m + n);
  K.topLeftCorner(m, m) = W.asDiagonal();
  K.topRightCorner(m, n) = E.transpose();
  K.bottomLeftCorner(n, m) = E;
  K.bottomRightCorner(n, n) = -2 * tp * Mat::Identity(n, n);
  Vec rhs = Vec::Zero(m + n);
  rhs.tail(n) = -u_free;
  const Vec sol = K.partialPivLu().solve(rhs);
  Mat f = Mat::Zero(n, Pf.slot_count());
  for (int c = 0; c < m; ++c) f(vars[c].second, vars[c].first) = sol[c];
  return f;
}

}  // namespace kdvb
