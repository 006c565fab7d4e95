#pragma once

#include <cmath>

namespace kdvb {

// Running sum that also tracks the sum of absolute terms (cancellation scale).
struct TermSum {
  double value = 0, magnitude = 0;
  void add(double term) {
    value += term;
    magnitude += std::abs(term);
  }
};

}  // namespace kdvb
