#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "kdvb/grid.hpp"

namespace kdvb {

// mt19937_64 is fully specified by the standard; the distribution layer is
// written out here because std::*_distribution output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    double u1 = uniform();
    while (u1 <= 0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
  }
  Vec normal_vector(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline StateVector random_state(GridPtr g, Rng& rng) { return StateVector(rng.normal_vector(g->n()), g); }

}  // namespace kdvb
