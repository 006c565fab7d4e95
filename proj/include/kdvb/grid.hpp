#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "kdvb/errors.hpp"

namespace kdvb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Uniform mesh of n interior nodes on (left, right); boundary values are
// eliminated, never stored.
class Grid {
 public:
  static Grid interval(double left, double right, int n) {
    require(std::isfinite(left) && std::isfinite(right) && right > left,
            "grid: interval must have right > left");
    require(n >= 8, "grid: need n >= 8 interior nodes, got " + std::to_string(n));
    return Grid(left, right, n);
  }

  double left() const { return left_; }
  double right() const { return right_; }
  double L() const { return 0.5 * (right_ - left_); }
  int n() const { return n_; }
  double h() const { return h_; }
  double x(int i) const { return left_ + (i + 1) * h_; }
  const Vec& nodes() const { return nodes_; }

  bool operator==(const Grid& o) const {
    return n_ == o.n_ && left_ == o.left_ && right_ == o.right_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  Grid(double left, double right, int n)
      : left_(left), right_(right), n_(n), h_((right - left) / (n + 1)), nodes_(n) {
    for (int i = 0; i < n; ++i) nodes_[i] = x(i);
  }

  double left_, right_;
  int n_;
  double h_;
  Vec nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Symmetric mesh on (-L, L).
inline GridPtr build_grid(double L, int n) {
  require(std::isfinite(L) && L > 0, "grid: L must be positive");
  return std::make_shared<const Grid>(Grid::interval(-L, L, n));
}

inline GridPtr build_interval_grid(double left, double right, int n) {
  return std::make_shared<const Grid>(Grid::interval(left, right, n));
}

struct StateVector {
  Vec values;
  GridPtr grid;

  StateVector() = default;
  StateVector(Vec v, GridPtr g) : values(std::move(v)), grid(std::move(g)) {
    require(grid != nullptr, "state: null grid");
    require(values.size() == grid->n(), "state: length does not match grid");
    require(values.allFinite(), "state: non-finite entry");
  }

  static StateVector zero(GridPtr g) {
    Vec z = Vec::Zero(g->n());
    return StateVector(std::move(z), std::move(g));
  }
  template <class F>
  static StateVector sample(GridPtr g, F&& f) {
    Vec v(g->n());
    for (int i = 0; i < g->n(); ++i) v[i] = f(g->x(i));
    return StateVector(std::move(v), std::move(g));
  }

  int size() const { return static_cast<int>(values.size()); }
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (a != b) throw InvalidArgument("grid mismatch");
}

// h-weighted trapezoid pairing; the eliminated boundary values are zero.
inline double inner_product(const StateVector& u, const StateVector& v) {
  require_same_grid(*u.grid, *v.grid);
  return u.grid->h() * u.values.dot(v.values);
}

inline double l2_norm(const Grid& g, const Vec& u) { return std::sqrt(g.h() * u.squaredNorm()); }
inline double l2_norm(const StateVector& u) { return l2_norm(*u.grid, u.values); }

// Open interval (lo, hi) inside the domain; observation/control region.
struct Interval {
  double lo = 0, hi = 0;
  bool contains(double x) const { return x > lo && x < hi; }
  double length() const { return hi - lo; }
};

// Indicator of nodes strictly inside omega.
inline Vec region_mask(const Grid& g, const Interval& omega) {
  Vec m(g.n());
  for (int i = 0; i < g.n(); ++i) m[i] = omega.contains(g.x(i)) ? 1.0 : 0.0;
  return m;
}

inline int mask_count(const Vec& mask) { return static_cast<int>(mask.sum() + 0.5); }

// First Dirichlet eigenfunction sin(k pi (x-left)/(right-left)) sampled on the mesh.
inline StateVector dirichlet_mode(GridPtr g, int k) {
  const double a = g->left(), w = g->right() - g->left();
  return StateVector::sample(g, [&](double x) { return std::sin(k * M_PI * (x - a) / w); });
}

}  // namespace kdvb
