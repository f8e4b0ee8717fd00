#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gencs/numerics.hpp"
#include "gencs/risk.hpp"

namespace gencs {

struct SolverConfig {
  double step_size = 1.0;
  int max_iters = 50000;
  /// Stop once ||v|| < grad_tol.
  double grad_tol = std::numeric_limits<double>::epsilon();
  bool negation_check = true;
  /// Explicit x_0. When absent x_0 has i.i.d. N(0, 1/k) entries drawn from
  /// Rng(init_seed).
  std::optional<Vector> initial_point;
  std::uint64_t init_seed = 0;

  /// Throws std::invalid_argument on a non-positive step, max_iters < 1 or
  /// negative grad_tol.
  void validate() const;
};

/// 2^d / d^2
double default_step_size(int depth);

enum class TerminationReason { GradientTolerance, MaxIterations };

std::string to_string(TerminationReason reason);

struct IterateRecord {
  int index = 0;
  double f = 0.0;          // f at the accepted iterate
  double grad_norm = 0.0;  // ||v|| at the accepted iterate
  bool negated = false;
  std::optional<double> rel_err;  // ||x - x_*|| / ||x_*|| when x_* is known
  bool perturbed = false;  // iterate hit exactly 0 and was nudged

  friend bool operator==(const IterateRecord&, const IterateRecord&) = default;
};

struct IterateTrace {
  std::vector<IterateRecord> records;
  TerminationReason reason = TerminationReason::MaxIterations;
};

struct SolveResult {
  Vector x_hat;
  IterateTrace trace;
  Vector signal;  // G(x_hat)
};

class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, IterateTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const IterateTrace& trace() const noexcept { return trace_; }

 private:
  IterateTrace trace_;
};

Vector default_initial_point(std::size_t latent_dim, std::uint64_t seed);

/// Gradient descent with the negation check:
///   x~_i = -x_i if negation_check and f(-x_i) < f(x_i), else x_i
///   x_{i+1} = x~_i - step_size * v(x~_i)
/// One record per accepted iterate x~_0, x~_1, ...; x_hat is the last one.
/// Throws DivergedError if f or v becomes non-finite.
SolveResult solve(const RecoveryProblem& p, const SolverConfig& cfg);

}  // namespace gencs
