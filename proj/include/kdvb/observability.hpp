#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kdvb/evolution.hpp"
#include "kdvb/parallel.hpp"
#include "kdvb/rng.hpp"

namespace kdvb {

// Quadratic forms u0 -> int_0^T |u|^2 over the whole interval and over omega.
struct Gramian {
  Mat G_full, G_omega;
  double T = 0;
  int nt = 0;
  Interval omega;
  GridPtr grid;
};

namespace detail {

inline std::pair<int, int> mask_range(const Grid& g, const Interval& omega) {
  int lo = g.n(), hi = -1;
  for (int i = 0; i < g.n(); ++i)
    if (omega.contains(g.x(i))) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  if (hi < lo) throw InvalidArgument("gramian: omega contains no grid node");
  return {lo, hi - lo + 1};
}

}  // namespace detail

// One propagation of the identity block serves every omega in the list.
inline std::vector<Gramian> assemble_gramians(const GridPtr& grid, double T, int nt, const std::vector<Interval>& omegas,
                                              int threads = 1) {
  require(T > 0 && nt >= 1, "gramian: need T > 0 and nt >= 1");
  require(!omegas.empty(), "gramian: no observation region");
  const Grid& g = *grid;
  const int n = g.n();
  std::vector<std::pair<int, int>> ranges;
  for (const auto& om : omegas) {
    require(om.lo >= g.left() && om.hi <= g.right() && om.lo < om.hi, "gramian: omega must lie inside the domain");
    ranges.push_back(detail::mask_range(g, om));
  }
  const Propagator P(build_operator(grid, OperatorKind::Forward), 0.0, T, nt);
  const double dt = P.dt();
  Mat U = Mat::Identity(n, n);
  Mat Gf = Mat::Zero(n, n);
  std::vector<Mat> Go(omegas.size(), Mat::Zero(n, n));
  auto accumulate = [&](double w) {
    Gf.selfadjointView<Eigen::Lower>().rankUpdate(U.transpose(), w);
    for (std::size_t r = 0; r < ranges.size(); ++r)
      Go[r].selfadjointView<Eigen::Lower>().rankUpdate(U.middleRows(ranges[r].first, ranges[r].second).transpose(), w);
  };
  const auto& st = P.stages();
  accumulate(0.5 * dt * g.h());
  for (int s = 0; s < P.slot_count(); ++s) {
    parallel_chunks(n, threads, [&](int b, int e) {
      for (int c = b; c < e; ++c) P.forward_stage(s, U.col(c));
    });
    if (s + 1 == P.slot_count() || st[s + 1].macro != st[s].macro) {
      const bool last = s + 1 == P.slot_count();
      accumulate((last ? 0.5 : 1.0) * dt * g.h());
    }
  }
  std::vector<Gramian> out;
  for (std::size_t r = 0; r < omegas.size(); ++r) {
    Gramian gr;
    gr.G_full = Gf.selfadjointView<Eigen::Lower>();
    gr.G_omega = Go[r].selfadjointView<Eigen::Lower>();
    gr.T = T;
    gr.nt = nt;
    gr.omega = omegas[r];
    gr.grid = grid;
    out.push_back(std::move(gr));
  }
  return out;
}

inline Gramian assemble_gramians(const GridPtr& grid, double T, int nt, const Interval& omega, int threads = 1) {
  return assemble_gramians(grid, T, nt, std::vector<Interval>{omega}, threads).front();
}

enum class EigenMethod { Auto, Dense, Iterative };

struct ObservabilityResult {
  double C_obs = std::numeric_limits<double>::quiet_NaN();
  Vec worst_u0;          // unit h-norm maximizer
  bool converged = false;
  int iterations = 0;
  std::string method;
  double tau = 0;
  double floor = 0;      // tau * trace(G_full) / n added to G_omega
};

inline constexpr int kDenseEigenLimit = 200;

namespace detail {

// Largest eigenpairs of the symmetric map x -> Lc^{-1} G Lc^{-T} x by a
// locally optimal block iteration (current block, residuals, previous step).
inline ObservabilityResult block_top_eigen(const Mat& Gf, const Eigen::LLT<Mat>& chol, int block, int max_iter,
                                           double tol, std::uint64_t seed) {
  const int n = static_cast<int>(Gf.rows());
  block = std::min(block, n);
  auto apply = [&](const Mat& X) {
    Mat Y = chol.matrixU().solve(X);
    Y = Gf * Y;
    return Mat(chol.matrixL().solve(Y));
  };
  Rng rng(seed);
  Mat X(n, block);
  for (int j = 0; j < block; ++j) X.col(j) = rng.normal_vector(n);
  X = Eigen::HouseholderQR<Mat>(X).householderQ() * Mat::Identity(n, block);
  Mat P(n, 0);
  ObservabilityResult r;
  r.method = "block-iteration";
  double theta = 0;
  Vec top;
  for (int it = 1; it <= max_iter; ++it) {
    const Mat CX = apply(X);
    Eigen::SelfAdjointEigenSolver<Mat> small(X.transpose() * CX);
    const Mat Y = small.eigenvectors().rowwise().reverse();
    X = X * Y;
    const Mat CXr = CX * Y;
    const Vec th = small.eigenvalues().reverse();
    Mat R = CXr - X * th.asDiagonal();
    theta = th[0];
    top = X.col(0);
    r.iterations = it;
    if (R.col(0).norm() <= tol * std::abs(theta)) {
      r.converged = true;
      break;
    }
    Mat S(n, X.cols() + R.cols() + P.cols());
    S << X, R, P;
    const Eigen::Index m = std::min<Eigen::Index>(S.cols(), n);
    const Mat Q = Eigen::HouseholderQR<Mat>(S).householderQ() * Mat::Identity(n, m);
    Eigen::SelfAdjointEigenSolver<Mat> rr(Q.transpose() * apply(Q));
    const Mat Z = rr.eigenvectors().rowwise().reverse().leftCols(block);
    const Mat Xn = Q * Z;
    P = Xn - X * (X.transpose() * Xn);
    X = Xn;
  }
  r.C_obs = std::sqrt(theta);
  r.worst_u0 = chol.matrixU().solve(top);
  return r;
}

}  // namespace detail

// sqrt of the largest generalized eigenvalue of (G_full, G_omega + floor I).
inline ObservabilityResult observability_constant(const Gramian& gr, double tau = 0.0,
                                                  EigenMethod method = EigenMethod::Auto, int max_iter = 5000,
                                                  std::uint64_t seed = 1) {
  require(tau >= 0, "observability_constant: tau must be nonnegative");
  const int n = static_cast<int>(gr.G_full.rows());
  ObservabilityResult r;
  r.tau = tau;
  r.floor = tau * gr.G_full.trace() / n;
  Mat B = gr.G_omega;
  B.diagonal().array() += r.floor;
  Eigen::LLT<Mat> chol(B);
  if (chol.info() != Eigen::Success) throw NumericalBreakdown("observability_constant: observed form is not positive definite");
  const bool dense = method == EigenMethod::Dense || (method == EigenMethod::Auto && n <= kDenseEigenLimit);
  if (dense) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(gr.G_full, B);
    if (es.info() != Eigen::Success) throw NumericalBreakdown("observability_constant: dense eigensolve failed");
    const double lmax = es.eigenvalues()[n - 1];
    r.C_obs = std::sqrt(lmax);
    r.worst_u0 = es.eigenvectors().col(n - 1);
    r.converged = true;
    r.method = "dense";
  } else {
    const auto res = detail::block_top_eigen(gr.G_full, chol, 8, max_iter, 1e-8, seed);
    const double t = r.tau, f = r.floor;
    r = res;
    r.tau = t;
    r.floor = f;
  }
  const double nrm = l2_norm(*gr.grid, r.worst_u0);
  r.worst_u0 /= nrm;
  // Sign convention: largest-magnitude entry positive.
  Eigen::Index imax;
  r.worst_u0.cwiseAbs().maxCoeff(&imax);
  if (r.worst_u0[imax] < 0) r.worst_u0 = -r.worst_u0;
  return r;
}

// Rayleigh quotient sqrt(u0' G_full u0 / u0' G_omega u0).
inline double gramian_ratio(const Gramian& gr, const Vec& u0) {
  return std::sqrt(u0.dot(gr.G_full * u0) / u0.dot(gr.G_omega * u0));
}

// Full-norm to omega-norm ratio of int_0^T |u|^2 on a direct run.
inline double trajectory_ratio(const Trajectory& tr, const Interval& omega) {
  const Grid& g = *tr.grid();
  const Vec mask = region_mask(g, omega);
  Vec full(tr.steps() + 1), obs(tr.steps() + 1);
  for (int k = 0; k <= tr.steps(); ++k) {
    const auto u = tr.states().col(k);
    full[k] = g.h() * u.squaredNorm();
    obs[k] = g.h() * (mask.array() * u.array().square()).sum();
  }
  return std::sqrt(tr.time_integral(full) / tr.time_integral(obs));
}

struct SampleCheckReport {
  int trials = 0;
  double max_ratio = 0;
  std::vector<double> ratios;
};

inline SampleCheckReport sample_check(const GridPtr& grid, double T, int nt, const Interval& omega, int trials,
                                      std::uint64_t seed = 1) {
  require(trials >= 1, "sample_check: need at least one trial");
  const auto op = build_operator(grid, OperatorKind::Forward);
  const Propagator P(op, 0.0, T, nt);
  Rng rng(seed);
  SampleCheckReport r;
  r.trials = trials;
  for (int k = 0; k < trials; ++k) {
    const StateVector u0 = random_state(grid, rng);
    r.ratios.push_back(trajectory_ratio(run_forward(P, u0.values), omega));
    r.max_ratio = std::max(r.max_ratio, r.ratios.back());
  }
  return r;
}

// v(t, y) = u(T - t, L - y): time reversed and reflected run. Its norm is
// nondecreasing in t.
inline Trajectory reversed_reflected(const Trajectory& u) {
  Mat s = u.states().reverse();
  return Trajectory(u.grid(), 0.0, u.T() - u.t0(), std::move(s), u.scheme() + "+reversed");
}

struct TimeAveragingReport {
  double lhs = 0;    // |v(0)|^2
  double rhs = 0;    // (3/T) int_{T/3}^{2T/3} |v|^2
  double slack = 0;  // rhs - lhs
  bool holds = true;
};

inline TimeAveragingReport time_averaging_bound(const Trajectory& v) {
  const Grid& g = *v.grid();
  const double T = v.T() - v.t0(), a = v.t0() + T / 3, b = v.t0() + 2 * T / 3;
  auto sq = [&](const Vec& w) { return g.h() * w.squaredNorm(); };
  // Trapezoid over the stored levels inside (a, b) plus interpolated ends.
  std::vector<double> ts{a}, vs{sq(v.at(a))};
  for (int k = 0; k <= v.steps(); ++k)
    if (v.time(k) > a && v.time(k) < b) {
      ts.push_back(v.time(k));
      vs.push_back(sq(v.states().col(k)));
    }
  ts.push_back(b);
  vs.push_back(sq(v.at(b)));
  double integral = 0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) integral += 0.5 * (ts[k + 1] - ts[k]) * (vs[k] + vs[k + 1]);
  TimeAveragingReport r;
  r.lhs = sq(v.states().col(0));
  r.rhs = 3 / T * integral;
  r.slack = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs * (1 + 1e-12) || r.lhs == 0;
  return r;
}

}  // namespace kdvb
