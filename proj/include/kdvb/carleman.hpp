#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kdvb/detail/closed_forms.hpp"
#include "kdvb/evolution.hpp"
#include "kdvb/jet.hpp"
#include "kdvb/parallel.hpp"
#include "kdvb/rng.hpp"
#include "kdvb/weight_psi.hpp"

namespace kdvb {

struct CarlemanParams {
  double s;
  double T;
  WeightPsi psi;
};

inline void validate(const CarlemanParams& p) {
  require(std::isfinite(p.s) && p.s > 0, "carleman: s must be positive");
  require(std::isfinite(p.T) && p.T > 0, "carleman: T must be positive");
}

// phi = psi(x) g(t), g = 1/(t(T-t)). x[k] = d^k phi/dx^k, xt[k] = d^{k+1} phi/dx^k dt.
struct PhiDerivatives {
  std::array<double, 7> x{};
  double t = 0, tt = 0;
  std::array<double, 4> xt{};
};

namespace detail {
inline void require_open_time(double T, double t) {
  if (!(t > 0 && t < T)) throw InvalidArgument("carleman: t must lie in (0, T)");
}
}  // namespace detail

inline PhiDerivatives evaluate_phi(const CarlemanParams& p, double t, double x) {
  validate(p);
  detail::require_open_time(p.T, t);
  require(x >= -p.psi.L() && x <= p.psi.L(), "carleman: x outside [-L, L]");
  const double q = t * (p.T - t), g = 1 / q, m = p.T - 2 * t;
  const double g1 = -m * g * g, g2 = 2 * g * g + 2 * m * m * g * g * g;
  PhiDerivatives d;
  for (int k = 0; k <= 6; ++k) d.x[k] = p.psi(x, k) * g;
  d.t = p.psi(x, 0) * g1;
  d.tt = p.psi(x, 0) * g2;
  for (int k = 1; k <= 3; ++k) d.xt[k] = p.psi(x, k) * g1;
  return d;
}

struct Coefficients {
  double A = 0, B = 0, C = 0, D = 0, E = 0, F = 0, G = 0, H = 0;
  std::array<double, 8> as_array() const { return {A, B, C, D, E, F, G, H}; }
};

inline constexpr std::array<const char*, 8> kCoefficientNames = {"A", "B", "C", "D", "E", "F", "G", "H"};

// A..F at (t, x); G and H at (t, -L). Both evaluation paths are kept.
struct CoefficientBundle {
  Coefficients closed;     // expanded closed forms
  Coefficients automatic;  // Taylor-jet differentiation of the defining expressions
  Coefficients scale;      // sum of absolute closed-form terms
  double lead = 0;         // -15 s^5 phi_x^4 phi_xx
  double D1 = 0;

  std::array<double, 8> relative_gaps() const {
    const auto a = closed.as_array(), b = automatic.as_array(), c = scale.as_array();
    std::array<double, 8> g{};
    for (int k = 0; k < 8; ++k) g[k] = std::abs(a[k] - b[k]) / std::max(c[k], std::numeric_limits<double>::min());
    return g;
  }
  double max_relative_gap() const {
    double m = 0;
    for (double v : relative_gaps()) m = std::max(m, v);
    return m;
  }
};

inline constexpr int kJetOrder = 6;
using CarlemanJet = Jet2<kJetOrder>;

inline CarlemanJet phi_jet(const CarlemanParams& p, double t, double x) {
  const double q0 = t * (p.T - t), q1 = p.T - 2 * t, q2 = -1;
  std::array<double, kJetOrder + 1> g{};
  g[0] = 1 / q0;
  for (int k = 1; k <= kJetOrder; ++k) g[k] = -(q1 * g[k - 1] + (k >= 2 ? q2 * g[k - 2] : 0.0)) / q0;
  return CarlemanJet::outer(p.psi.taylor<kJetOrder>(x), g);
}

namespace detail {

struct JetCoefficients {
  CarlemanJet A, B, C;
};

inline JetCoefficients abc(const CarlemanJet& phi, double s) {
  const CarlemanJet px = phi.dx(), pxx = px.dx(), pxxx = pxx.dx(), pt = phi.dt();
  JetCoefficients r;
  r.A = s * (pt - pxx + pxxx) + 3 * s * s * (px * pxx) + s * s * s * (px * px * px) - s * s * (px * px);
  r.B = 3 * s * pxx + 3 * s * s * (px * px) - 2 * s * px;
  r.C = 3 * s * px - 1.0;
  return r;
}

}  // namespace detail

inline Coefficients coefficients_by_jets(const CarlemanParams& p, double t, double x) {
  const double s = p.s;
  Coefficients c;
  {
    const auto j = detail::abc(phi_jet(p, t, x), s);
    const CarlemanJet Cx = j.C.dx();
    const CarlemanJet D = -(j.A.dt() + j.A.dx().dx().dx() + (j.A * j.B).dx() + (Cx * j.A).dx());
    const CarlemanJet E = 3 * j.A.dx() + j.B * Cx - j.B.dx() * j.C - (j.C * Cx).dx() + Cx.dx().dx() + j.C.dt();
    c.A = j.A.value();
    c.B = j.B.value();
    c.C = j.C.value();
    c.D = D.value();
    c.E = E.value();
    c.F = -3 * Cx.value();
  }
  {
    const auto j = detail::abc(phi_jet(p, t, -p.psi.L()), s);
    const CarlemanJet Cx = j.C.dx();
    c.G = (j.A - j.B * j.C - j.C * Cx + Cx.dx() - Cx * Cx).value();
    c.H = -j.C.value() - 1;
  }
  return c;
}

inline CoefficientBundle coefficient_bundle(const CarlemanParams& p, double t, double x) {
  const PhiDerivatives d = evaluate_phi(p, t, x);
  const PhiDerivatives db = evaluate_phi(p, t, -p.psi.L());
  const double s = p.s;
  CoefficientBundle b;
  const TermSum A = closed_form::A(d, s), B = closed_form::B(d, s), C = closed_form::C(d, s);
  const TermSum D = closed_form::D(d, s), E = closed_form::E(d, s), F = closed_form::F(d, s);
  const TermSum G = closed_form::G(db, s), H = closed_form::H(db, s);
  b.closed = {A.value, B.value, C.value, D.value, E.value, F.value, G.value, H.value};
  b.scale = {A.magnitude, B.magnitude, C.magnitude, D.magnitude, E.magnitude, F.magnitude, G.magnitude, H.magnitude};
  b.lead = -15 * std::pow(s, 5) * std::pow(d.x[1], 4) * d.x[2];
  b.D1 = closed_form::D1(d, s).value;
  b.automatic = coefficients_by_jets(p, t, x);
  return b;
}

// ------------------------------------------------------------ weight bounds

struct WeightEstimateReport {
  int samples = 0;
  double K1_fit = 0, K2_fit = 0;
  std::array<double, 7> C_fit{};
  double K1_bound = 0, K2_bound = 0;  // closed-form bounds from psi_min, |psi^(k)|_max
  std::array<double, 7> C_bound{};
  double max_violation = 0;           // of the closed-form bounds, relative
};

inline WeightEstimateReport verify_weight_estimates(const CarlemanParams& p, int sample_count, std::uint64_t seed = 1) {
  validate(p);
  require(sample_count >= 1, "verify_weight_estimates: need samples");
  const double L = p.psi.L(), T = p.T, pmin = p.psi.min_value();
  WeightEstimateReport r;
  r.samples = sample_count;
  r.K1_bound = T / pmin;
  r.K2_bound = 2 * T * T / pmin;
  r.K2_bound /= pmin;
  for (int k = 1; k <= 6; ++k) {
    double m = 0;
    const int scan = 20000;
    for (int i = 0; i <= scan; ++i) m = std::max(m, std::abs(p.psi(-L + 2 * L * i / scan, k)));
    for (const auto& pc : p.psi.pieces()) m = std::max({m, std::abs(pc.derivative(pc.lo, k)), std::abs(pc.derivative(pc.hi, k))});
    r.C_bound[k] = m / pmin;
  }
  Rng rng(seed);
  for (int i = 0; i < sample_count; ++i) {
    double t = rng.uniform(0, T);
    while (!(t > 0 && t < T)) t = rng.uniform(0, T);
    const double x = rng.uniform(-L, L);
    const PhiDerivatives d = evaluate_phi(p, t, x);
    const double phi = d.x[0];
    const double k1 = std::abs(d.t) / (phi * phi), k2 = std::abs(d.tt) / (phi * phi * phi);
    r.K1_fit = std::max(r.K1_fit, k1);
    r.K2_fit = std::max(r.K2_fit, k2);
    r.max_violation = std::max({r.max_violation, k1 / r.K1_bound - 1, k2 / r.K2_bound - 1});
    for (int k = 1; k <= 6; ++k) {
      const double ck = std::abs(d.x[k]) / phi;
      r.C_fit[k] = std::max(r.C_fit[k], ck);
      if (r.C_bound[k] > 0) r.max_violation = std::max(r.max_violation, ck / r.C_bound[k] - 1);
      else if (ck > 0) r.max_violation = std::numeric_limits<double>::infinity();
    }
  }
  r.max_violation = std::max(0.0, r.max_violation);
  return r;
}

// ------------------------------------------------------- positivity scans

struct PositivityScan {
  bool ok = true;
  std::string first_failure;
  double min_lead = std::numeric_limits<double>::infinity();  // -15 s^5 phi_x^4 phi_xx outside omega
  double min_D = std::numeric_limits<double>::infinity();
  double min_G = std::numeric_limits<double>::infinity();
  double min_H = std::numeric_limits<double>::infinity();
};

struct ScanMesh {
  std::vector<double> x_exterior, t;
};

inline ScanMesh scan_mesh(const WeightPsi& psi, double T, int nx, int nt) {
  ScanMesh m;
  const double L = psi.L(), l1 = psi.omega().lo, l2 = psi.omega().hi;
  const double outside = (l1 + L) + (L - l2);
  const int nl = std::max(2, static_cast<int>(std::lround(nx * (l1 + L) / outside)));
  const int nr = std::max(2, nx - nl);
  for (int i = 0; i <= nl; ++i) m.x_exterior.push_back(-L + (l1 + L) * i / nl);
  for (int i = 0; i <= nr; ++i) m.x_exterior.push_back(l2 + (L - l2) * i / nr);
  for (int k = 0; k < nt; ++k) m.t.push_back(T * (k + 0.5) / nt);
  return m;
}

inline PositivityScan scan_positivity(const CarlemanParams& p, const ScanMesh& mesh, int threads = 1) {
  validate(p);
  const int nt = static_cast<int>(mesh.t.size());
  std::vector<PositivityScan> rows(nt);
  parallel_chunks(nt, threads, [&](int b, int e) {
    for (int k = b; k < e; ++k) {
      PositivityScan& r = rows[k];
      const double t = mesh.t[k];
      const PhiDerivatives db = evaluate_phi(p, t, -p.psi.L());
      r.min_G = closed_form::G(db, p.s).value;
      r.min_H = closed_form::H(db, p.s).value;
      for (double x : mesh.x_exterior) {
        const PhiDerivatives d = evaluate_phi(p, t, x);
        r.min_lead = std::min(r.min_lead, -15 * std::pow(p.s, 5) * std::pow(d.x[1], 4) * d.x[2]);
        r.min_D = std::min(r.min_D, closed_form::D(d, p.s).value);
      }
    }
  });
  PositivityScan out;
  for (const auto& r : rows) {
    out.min_lead = std::min(out.min_lead, r.min_lead);
    out.min_D = std::min(out.min_D, r.min_D);
    out.min_G = std::min(out.min_G, r.min_G);
    out.min_H = std::min(out.min_H, r.min_H);
  }
  if (!(out.min_lead > 0)) out.first_failure = "leading term -15 s^5 phi_x^4 phi_xx > 0 outside omega";
  else if (!(out.min_D > 0)) out.first_failure = "D > 0 outside omega";
  else if (!(out.min_G > 0)) out.first_failure = "G > 0 at x = -L";
  else if (!(out.min_H > 0)) out.first_failure = "H > 0 at x = -L";
  out.ok = out.first_failure.empty();
  return out;
}

struct SStarReport {
  double s_star = 0;
  std::vector<double> s_checked;
  std::vector<PositivityScan> scans;
  bool all_ok = false;
};

// Smallest s (to relative 1e-6) passing the D/G/H scans, then re-scanned on a
// geometric sweep over [s*, 8 s*] that includes s*, 2s*, 4s*, 8s*.
inline SStarReport find_s_star(const WeightPsi& psi, double T, int nx = 200, int nt = 200, int threads = 1) {
  const ScanMesh mesh = scan_mesh(psi, T, nx, nt);
  auto passes = [&](double s) { return scan_positivity({s, T, psi}, mesh, threads).ok; };
  double hi = 1e-3;
  int guard = 0;
  while (!passes(hi)) {
    hi *= 2;
    if (++guard > 80) throw NumericalBreakdown("find_s_star: no s passes the positivity scans");
  }
  double lo = hi / 2;
  if (guard == 0) lo = 0;
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  SStarReport r;
  r.s_star = hi;
  r.all_ok = true;
  for (int k = 0; k <= 12; ++k) {
    const double s = hi * std::pow(2.0, k / 4.0);
    r.s_checked.push_back(s);
    r.scans.push_back(scan_positivity({s, T, psi}, mesh, threads));
    r.all_ok = r.all_ok && r.scans.back().ok;
  }
  return r;
}

// ----------------------------------------------------------- ratio probes

namespace detail {

// Streaming log-sum-exp of terms c * exp(e), c >= 0.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0;
  void add(double c, double e) {
    if (!(c > 0)) return;
    const double l = std::log(c) + e;
    if (l > max) {
      sum = sum * std::exp(max - l) + 1;
      max = l;
    } else {
      sum += std::exp(l - max);
    }
  }
  bool empty() const { return sum == 0; }
  double log() const { return max + std::log(sum); }
};

inline double log_ratio(const LogSum& a, const LogSum& b) { return a.log() - b.log(); }

}  // namespace detail

struct RatioReport {
  bool applicable = false;  // false: both sides vanish
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double log_lhs = -std::numeric_limits<double>::infinity();
  double log_rhs = -std::numeric_limits<double>::infinity();
};

inline RatioReport finish_ratio(const detail::LogSum& lhs, const detail::LogSum& rhs) {
  RatioReport r;
  if (lhs.empty() && rhs.empty()) return r;
  r.applicable = true;
  if (!lhs.empty()) r.log_lhs = lhs.log();
  if (!rhs.empty()) r.log_rhs = rhs.log();
  r.ratio = rhs.empty() ? std::numeric_limits<double>::infinity() : std::exp(r.log_lhs - r.log_rhs);
  return r;
}

// Both sides of the Carleman inequality on a computed trajectory: trapezoid
// in space over the closed interval, interior time levels only.
inline RatioReport carleman_ratio(const Trajectory& tr, const CarlemanParams& p) {
  validate(p);
  const Grid& g = *tr.grid();
  require(std::abs(g.L() - p.psi.L()) < 1e-12 * g.L() && std::abs(g.left() + g.L()) < 1e-12 * g.L(),
          "carleman_ratio: trajectory grid does not match the weight's domain");
  require(std::abs(tr.T() - tr.t0() - p.T) < 1e-12 * p.T, "carleman_ratio: horizon mismatch");
  const int n = g.n();
  const double h = g.h(), L = g.L();
  std::vector<double> xs(n + 2), wq(n + 2, h), psi(n + 2);
  std::vector<bool> in_omega(n + 2);
  for (int j = 0; j < n + 2; ++j) {
    xs[j] = -L + j * h;
    psi[j] = p.psi(std::min(L, std::max(-L, xs[j])));
    in_omega[j] = p.psi.omega().contains(xs[j]);
  }
  wq[0] = wq[n + 1] = h / 2;
  const double psi_b = p.psi(-L);
  detail::LogSum lhs, rhs;
  Vec e(n + 2);
  for (int k = 1; k < tr.steps(); ++k) {
    const double t = tr.time(k) - tr.t0();
    const double gt = 1 / (t * (p.T - t)), dt = tr.dt();
    e.setZero();
    e.segment(1, n) = tr.states().col(k);
    for (int j = 0; j < n + 2; ++j) {
      double ux, uxx;
      if (j == 0) {
        ux = (-3 * e[0] + 4 * e[1] - e[2]) / (2 * h);
        uxx = (2 * e[0] - 5 * e[1] + 4 * e[2] - e[3]) / (h * h);
      } else if (j == n + 1) {
        ux = (3 * e[j] - 4 * e[j - 1] + e[j - 2]) / (2 * h);
        uxx = (2 * e[j] - 5 * e[j - 1] + 4 * e[j - 2] - e[j - 3]) / (h * h);
      } else {
        ux = (e[j + 1] - e[j - 1]) / (2 * h);
        uxx = (e[j + 1] - 2 * e[j] + e[j - 1]) / (h * h);
      }
      const double sp = p.s * psi[j] * gt;
      const double c = (std::pow(sp, 5) * e[j] * e[j] + std::pow(sp, 3) * ux * ux + sp * uxx * uxx) * wq[j] * dt;
      lhs.add(c, -2 * sp);
      if (in_omega[j]) rhs.add(c, -2 * sp);
      if (j == 0) {
        const double sb = p.s * psi_b * gt;
        lhs.add((std::pow(sb, 3) * ux * ux + sb * uxx * uxx) * dt, -2 * sb);
      }
    }
  }
  return finish_ratio(lhs, rhs);
}

struct WeightedObservabilityReport {
  RatioReport ratio;
  double max_hat_over_check = 0;  // sup_t phi_hat / phi_check
};

inline WeightedObservabilityReport weighted_observability_ineq(const Trajectory& tr, const CarlemanParams& p) {
  validate(p);
  const Grid& g = *tr.grid();
  const Vec mask = region_mask(g, p.psi.omega());
  detail::LogSum lhs, rhs;
  WeightedObservabilityReport r;
  for (int k = 1; k < tr.steps(); ++k) {
    const double t = tr.time(k) - tr.t0();
    const double gt = 1 / (t * (p.T - t));
    const double hat = p.psi.max_value() * gt, chk = p.psi.min_value() * gt;
    r.max_hat_over_check = std::max(r.max_hat_over_check, hat / chk);
    const Vec u = tr.states().col(k);
    const double full = g.h() * u.squaredNorm();
    const double obs = g.h() * (mask.array() * u.array().square()).sum();
    const double s = p.s, dt = tr.dt();
    lhs.add(dt * full, 5 * std::log(s) + 5 * std::log(chk) - 2 * s * hat);
    rhs.add(dt * obs, 10 * std::log(s) + s * (6 * hat - 8 * chk) + 31 * std::log(chk));
  }
  r.ratio = finish_ratio(lhs, rhs);
  return r;
}

}  // namespace kdvb
