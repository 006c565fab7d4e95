#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "kdvb/errors.hpp"
#include "kdvb/grid.hpp"

namespace kdvb {

// Polynomial of degree <= 5 in (x - center), valid on [lo, hi].
struct PolyPiece {
  double lo, hi, center;
  std::array<double, 6> coef{};

  double derivative(double x, int k) const {
    const double y = x - center;
    double s = 0, p = 1;
    for (int m = k; m < 6; ++m) {
      double f = 1;
      for (int r = 0; r < k; ++r) f *= (m - r);
      s += f * coef[m] * p;
      p *= y;
    }
    return s;
  }
};

// Spatial Carleman weight. Pieces on [-L, l1], [l1, l3], [l3, l2], [l2, L];
// C^3 across the knots.
class WeightPsi {
 public:
  static WeightPsi constant(double L, double c) {
    WeightPsi w;
    w.L_ = L;
    w.omega_ = {-L, L};
    w.l3_ = 0;
    PolyPiece p{-L, L, 0.0, {}};
    p.coef[0] = c;
    w.pieces_ = {p};
    w.min_ = w.max_ = c;
    return w;
  }

  double L() const { return L_; }
  const Interval& omega() const { return omega_; }
  double l3() const { return l3_; }
  double min_value() const { return min_; }
  double max_value() const { return max_; }
  const std::vector<PolyPiece>& pieces() const { return pieces_; }

  const PolyPiece& piece(double x) const {
    for (const auto& p : pieces_)
      if (x < p.hi) return p;
    return pieces_.back();
  }

  // k-th derivative, k <= 6 (the sixth vanishes piecewise).
  double operator()(double x, int k = 0) const { return piece(x).derivative(x, k); }

  // Taylor coefficients psi^(k)(x)/k!, k = 0..N.
  template <int N>
  std::array<double, N + 1> taylor(double x) const {
    std::array<double, N + 1> t{};
    const PolyPiece& p = piece(x);
    double f = 1;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) f *= k;
      t[k] = k < 6 ? p.derivative(x, k) / f : 0.0;
    }
    return t;
  }

 private:
  friend WeightPsi build_psi(double, Interval, int);
  double L_ = 0, l3_ = 0, min_ = 0, max_ = 0;
  Interval omega_;
  std::vector<PolyPiece> pieces_;
};

struct PsiCheck {
  std::string condition;
  bool ok;
  std::string detail;
};

namespace detail {

// Half profile in the distance d from l3: quintic well on [0, a] with
// q'(0) = 0, q''(0) = kappa and cubic coefficient c3, joined C^3 to a concave
// cubic on [a, a + D] with q'' = -kappa_out, q''' = -jerk at the join.
struct HalfProfile {
  double a, D, kappa, kappa_out, jerk;
  double c3, c4, c5;  // inner quintic
  double qa, slope;

  HalfProfile(double a_, double D_, double kappa_, double c3_)
      : a(a_), D(D_), kappa(kappa_), kappa_out(a_ / (6 * D_ + a_)), jerk(kappa_out / D_), c3(c3_) {
    const double r1 = -kappa_out - kappa - 6 * c3 * a, r2 = -jerk - 6 * c3;
    const double m11 = 12 * a * a, m12 = 20 * a * a * a, m21 = 24 * a, m22 = 60 * a * a;
    const double det = m11 * m22 - m12 * m21;
    c4 = (r1 * m22 - m12 * r2) / det;
    c5 = (m11 * r2 - m21 * r1) / det;
    qa = kappa / 2 * a * a + c3 * std::pow(a, 3) + c4 * std::pow(a, 4) + c5 * std::pow(a, 5);
    slope = kappa * a + 3 * c3 * a * a + 4 * c4 * std::pow(a, 3) + 5 * c5 * std::pow(a, 4);
  }
  // Rise from the bottom of the well to the outer end.
  double rise() const { return qa + slope * D - kappa_out / 2 * D * D - jerk / 6 * D * D * D; }
  std::array<double, 6> inner(double q0) const { return {q0, 0, kappa / 2, c3, c4, c5}; }
  std::array<double, 6> outer(double q0) const { return {q0 + qa, slope, -kappa_out / 2, -jerk / 6, 0, 0}; }
};

inline std::array<double, 6> mirrored(std::array<double, 6> c) {
  for (int k = 1; k < 6; k += 2) c[k] = -c[k];
  return c;
}

}  // namespace detail

// Samples every condition on a uniform scan plus the knots. Ordered; the
// first failing entry names the violated condition.
inline std::vector<PsiCheck> check_psi(const WeightPsi& psi, int samples = 10000) {
  const double L = psi.L();
  const Interval om = psi.omega();
  std::vector<double> xs;
  for (int k = 0; k <= samples; ++k) xs.push_back(-L + 2 * L * k / samples);
  for (const auto& p : psi.pieces()) {
    xs.push_back(p.lo);
    xs.push_back(p.hi);
  }
  std::sort(xs.begin(), xs.end());
  double worst_pos = 1e300, worst_slope = 1e300, worst_conc = -1e300, worst_mix = -1e300, lowest = 1e300;
  for (double x : xs) {
    const double v = psi(x), d1 = psi(x, 1), d2 = psi(x, 2), d3 = psi(x, 3);
    worst_pos = std::min(worst_pos, v);
    lowest = std::min(lowest, v);
    if (!om.contains(x)) {
      worst_slope = std::min(worst_slope, std::abs(d1));
      worst_conc = std::max(worst_conc, d2);
      worst_mix = std::max(worst_mix, d1 * d3);
    }
  }
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };
  const double left = psi(-L), right = psi(L), bottom = psi(psi.l3());
  std::vector<PsiCheck> out;
  out.push_back({"carl1 positivity", worst_pos > 0, "min psi = " + fmt(worst_pos)});
  out.push_back({"carl2 nonvanishing slope outside omega", worst_slope > 0, "min |psi'| = " + fmt(worst_slope)});
  out.push_back({"carl2 concavity outside omega", worst_conc < 0, "max psi'' = " + fmt(worst_conc)});
  out.push_back({"carl2 sign of psi' psi''' outside omega", worst_mix < 0, "max psi' psi''' = " + fmt(worst_mix)});
  out.push_back({"carl3 psi'(-L) < 0", psi(-L, 1) < 0, "psi'(-L) = " + fmt(psi(-L, 1))});
  out.push_back({"carl3 psi'(L) > 0", psi(L, 1) > 0, "psi'(L) = " + fmt(psi(L, 1))});
  out.push_back({"carl4 minimum at l3", lowest >= bottom * (1 - 1e-14) && om.contains(psi.l3()),
                 "min psi = " + fmt(lowest) + ", psi(l3) = " + fmt(bottom)});
  out.push_back({"carl4 equal boundary values", std::abs(left - right) <= 1e-12 * std::max(left, right),
                 "psi(-L) = " + fmt(left) + ", psi(L) = " + fmt(right)});
  out.push_back({"carl5 psi(-L) <= 4/3 psi(l3)", left <= 4.0 / 3.0 * bottom, "ratio = " + fmt(left / bottom)});
  return out;
}

inline WeightPsi build_psi(double L, Interval omega, int verify_samples = 10000) {
  require(L > 0 && std::isfinite(L), "build_psi: L must be positive");
  const double l1 = omega.lo, l2 = omega.hi;
  if (!(l1 > -L && l2 < L && l1 < l2))
    throw ConstructionFailure("omega inside (-L, L)", "need -L < l1 < l2 < L");
  const double l3 = 0.5 * (l1 + l2), a = 0.5 * (l2 - l1);
  const double DL = l1 + L, DR = L - l2;
  const double kappa = 1.0;

  // Each side's outer curvature and jerk follow from its own length. The
  // cubic coefficient at l3 enters the two sides with opposite signs (C^3)
  // and moves height between them; the rise is affine in it.
  auto gap = [&](double c3) {
    return detail::HalfProfile(a, DR, kappa, c3).rise() - detail::HalfProfile(a, DL, kappa, -c3).rise();
  };
  const double g0 = gap(0.0), g1 = gap(1.0);
  const double c3 = g1 == g0 ? 0.0 : -g0 / (g1 - g0);
  const detail::HalfProfile lp(a, DL, kappa, -c3), rp(a, DR, kappa, c3);

  // Bottom at 3.5x the rise keeps psi(+-L)/psi(l3) = 9/7 < 4/3; then scale max to 1.
  const double rise = rp.rise();
  const double q0 = 3.5 * rise;
  const double scale = 1.0 / (q0 + rise);

  WeightPsi w;
  w.L_ = L;
  w.omega_ = omega;
  w.l3_ = l3;
  auto scaled = [scale](std::array<double, 6> c) {
    for (double& v : c) v *= scale;
    return c;
  };
  w.pieces_ = {
      {-L, l1, l1, scaled(detail::mirrored(lp.outer(q0)))},
      {l1, l3, l3, scaled(detail::mirrored(lp.inner(q0)))},
      {l3, l2, l3, scaled(rp.inner(q0))},
      {l2, L, l2, scaled(rp.outer(q0))},
  };
  w.min_ = w(l3);
  w.max_ = std::max(w(-L), w(L));
  for (int k = 0; k <= verify_samples; ++k) {
    const double v = w(-L + 2 * L * k / verify_samples);
    w.min_ = std::min(w.min_, v);
    w.max_ = std::max(w.max_, v);
  }
  for (const auto& c : check_psi(w, verify_samples))
    if (!c.ok) throw ConstructionFailure(c.condition, c.detail);
  return w;
}

}  // namespace kdvb
