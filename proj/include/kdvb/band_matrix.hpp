#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "kdvb/errors.hpp"
#include "kdvb/grid.hpp"

namespace kdvb {

// Square band matrix, kl sub- and ku super-diagonals. Row-major band storage:
// entry (i, j) lives at band_(i, j - i + kl).
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), band_(Mat::Zero(n, kl + ku + 1)) {}

  int n() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }
  int width() const { return kl_ + ku_ + 1; }

  bool in_band(int i, int j) const { return j - i >= -kl_ && j - i <= ku_; }
  double operator()(int i, int j) const { return in_band(i, j) ? band_(i, j - i + kl_) : 0.0; }
  double& ref(int i, int j) { return band_(i, j - i + kl_); }
  // Writes falling outside the matrix (ghost columns) are dropped.
  void add(int i, int j, double v) {
    if (j < 0 || j >= n_) return;
    ref(i, j) += v;
  }

  Vec apply(const Vec& u) const {
    Vec y = Vec::Zero(n_);
    for (int i = 0; i < n_; ++i) {
      const int j0 = std::max(0, i - kl_), j1 = std::min(n_ - 1, i + ku_);
      double s = 0;
      for (int j = j0; j <= j1; ++j) s += band_(i, j - i + kl_) * u[j];
      y[i] = s;
    }
    return y;
  }

  BandMatrix transpose() const {
    BandMatrix t(n_, ku_, kl_);
    for (int i = 0; i < n_; ++i)
      for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) t.ref(j, i) = (*this)(i, j);
    return t;
  }

  // alpha*I + beta*this
  BandMatrix affine(double alpha, double beta) const {
    BandMatrix r = *this;
    r.band_ *= beta;
    for (int i = 0; i < n_; ++i) r.ref(i, i) += alpha;
    return r;
  }

  Mat to_dense() const {
    Mat d = Mat::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) d(i, j) = (*this)(i, j);
    return d;
  }

  bool operator==(const BandMatrix& o) const {
    return n_ == o.n_ && kl_ == o.kl_ && ku_ == o.ku_ && band_ == o.band_;
  }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  Mat band_;
};

// LU without pivoting. The step matrices factored here are I - c*A with A
// dissipative (positive real after a diagonal similarity), so the band is
// preserved and elimination is stable.
class BandedLU {
 public:
  BandedLU() = default;
  explicit BandedLU(BandMatrix m) : lu_(std::move(m)) {
    const int n = lu_.n(), kl = lu_.kl(), ku = lu_.ku();
    double scale = 0;
    for (int i = 0; i < n; ++i)
      for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) scale = std::max(scale, std::abs(lu_(i, j)));
    for (int k = 0; k < n; ++k) {
      const double piv = lu_(k, k);
      if (!(std::abs(piv) > 1e-14 * scale))
        throw NumericalBreakdown("banded LU: zero pivot at row " + std::to_string(k));
      for (int i = k + 1; i <= std::min(n - 1, k + kl); ++i) {
        const double l = lu_(i, k) / piv;
        lu_.ref(i, k) = l;
        for (int j = k + 1; j <= std::min(n - 1, k + ku); ++j) lu_.ref(i, j) -= l * lu_(k, j);
      }
    }
  }

  int n() const { return lu_.n(); }

  void solve_in_place(Eigen::Ref<Vec> b) const {
    const int n = lu_.n(), kl = lu_.kl(), ku = lu_.ku();
    for (int i = 0; i < n; ++i)
      for (int k = std::max(0, i - kl); k < i; ++k) b[i] -= lu_(i, k) * b[k];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j <= std::min(n - 1, i + ku); ++j) b[i] -= lu_(i, j) * b[j];
      b[i] /= lu_(i, i);
    }
  }

  // Solves M^T y = b with the same factors.
  void solve_transpose_in_place(Eigen::Ref<Vec> b) const {
    const int n = lu_.n(), kl = lu_.kl(), ku = lu_.ku();
    for (int i = 0; i < n; ++i) {
      for (int j = std::max(0, i - ku); j < i; ++j) b[i] -= lu_(j, i) * b[j];
      b[i] /= lu_(i, i);
    }
    for (int i = n - 1; i >= 0; --i)
      for (int k = i + 1; k <= std::min(n - 1, i + kl); ++k) b[i] -= lu_(k, i) * b[k];
  }

  Vec solve(Vec b) const {
    solve_in_place(b);
    return b;
  }

  void solve_columns(Eigen::Ref<Mat> B) const {
    for (Eigen::Index c = 0; c < B.cols(); ++c) solve_in_place(B.col(c));
  }

 private:
  BandMatrix lu_;
};

}  // namespace kdvb
