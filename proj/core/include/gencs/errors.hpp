#pragma once

#include <stdexcept>
#include <string>

namespace gencs {

// Power iteration ran out of iterations. Carries the last estimate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate) {}

  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

// Every sampled tuple in a randomized estimator was degenerate.
class DegenerateSamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gencs
