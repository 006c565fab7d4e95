#pragma once

#include <stdexcept>
#include <string>

namespace kdvb {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Linear solve or iteration could not proceed (zero pivot, lost curvature).
struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A constructed object failed its own verification; what() names the check.
struct ConstructionFailure : std::runtime_error {
  ConstructionFailure(std::string condition, const std::string& detail)
      : std::runtime_error(condition + ": " + detail), condition_(std::move(condition)) {}
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

// Refused because the request lies outside the supported parameter range.
struct OutOfScope : std::domain_error {
  using std::domain_error::domain_error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace kdvb
