#pragma once

#include <array>

namespace kdvb {

// Truncated bivariate Taylor polynomial sum c[i][j] dx^i dt^j, i + j <= N.
// Differentiation lowers the valid order by one; products keep the lower.
template <int N>
class Jet2 {
 public:
  Jet2() { c_.fill({}); }
  static Jet2 constant(double v) {
    Jet2 j;
    j.c_[0][0] = v;
    return j;
  }

  double& operator()(int i, int j) { return c_[i][j]; }
  double operator()(int i, int j) const { return c_[i][j]; }
  double value() const { return c_[0][0]; }

  // d^i/dx^i d^j/dt^j at the expansion point.
  double derivative(int i, int j) const { return c_[i][j] * factorial(i) * factorial(j); }

  Jet2 dx() const {
    Jet2 r;
    for (int i = 0; i < N; ++i)
      for (int j = 0; i + j < N; ++j) r.c_[i][j] = (i + 1) * c_[i + 1][j];
    return r;
  }
  Jet2 dt() const {
    Jet2 r;
    for (int i = 0; i < N; ++i)
      for (int j = 0; i + j < N; ++j) r.c_[i][j] = (j + 1) * c_[i][j + 1];
    return r;
  }

  Jet2& operator+=(const Jet2& o) {
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j) c_[i][j] += o.c_[i][j];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j) c_[i][j] -= o.c_[i][j];
    return *this;
  }
  Jet2& operator*=(double a) {
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j) c_[i][j] *= a;
    return *this;
  }
  Jet2& operator+=(double a) {
    c_[0][0] += a;
    return *this;
  }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator-(Jet2 a) { return a *= -1.0; }
  friend Jet2 operator*(Jet2 a, double k) { return a *= k; }
  friend Jet2 operator*(double k, Jet2 a) { return a *= k; }
  friend Jet2 operator+(Jet2 a, double k) { return a += k; }
  friend Jet2 operator-(Jet2 a, double k) { return a += -k; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    for (int i1 = 0; i1 <= N; ++i1)
      for (int j1 = 0; i1 + j1 <= N; ++j1) {
        const double v = a.c_[i1][j1];
        if (v == 0) continue;
        for (int i2 = 0; i1 + j1 + i2 <= N; ++i2)
          for (int j2 = 0; i1 + j1 + i2 + j2 <= N; ++j2) r.c_[i1 + i2][j1 + j2] += v * b.c_[i2][j2];
      }
    return r;
  }

  // Product of a pure-x series and a pure-t series.
  static Jet2 outer(const std::array<double, N + 1>& in_x, const std::array<double, N + 1>& in_t) {
    Jet2 r;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j) r.c_[i][j] = in_x[i] * in_t[j];
    return r;
  }

 private:
  static double factorial(int k) {
    double f = 1;
    for (int m = 2; m <= k; ++m) f *= m;
    return f;
  }
  std::array<std::array<double, N + 1>, N + 1> c_;
};

}  // namespace kdvb
