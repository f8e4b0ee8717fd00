#pragma once

#include <optional>
#include <span>

#include "gencs/generator.hpp"
#include "gencs/numerics.hpp"

namespace gencs {

/// Compressive recovery instance y = A G(x_*) + e.
struct RecoveryProblem {
  GeneratorNetwork net;
  Matrix measurement;  // A, m x n
  Vector observation;  // y, length m
  std::optional<Vector> ground_truth;  // x_*
  std::optional<Vector> noise;         // e

  /// Throws std::invalid_argument when shapes do not chain.
  RecoveryProblem(GeneratorNetwork net, Matrix measurement, Vector observation,
                  std::optional<Vector> ground_truth = std::nullopt,
                  std::optional<Vector> noise = std::nullopt);

  /// Builds y = A G(x_*) + e (e = 0 when absent).
  static RecoveryProblem from_ground_truth(GeneratorNetwork net, Matrix measurement,
                                           Vector ground_truth,
                                           std::optional<Vector> noise = std::nullopt);

  std::size_t latent_dim() const noexcept { return net.input_dim(); }
  std::size_t num_measurements() const noexcept { return measurement.rows(); }
};

/// f(x) = 1/2 ||A G(x) - y||^2
double risk_value(const RecoveryProblem& p, const Vector& x);

/// Lambda_x^T A^T (A Lambda_x x - y). This is the gradient of f wherever no
/// pre-activation is exactly zero; on that measure-zero set it is the
/// strict-mask choice and need not be a Clarke subgradient.
/// Throws std::invalid_argument for x = 0 or a dimension mismatch.
Vector step_direction(const RecoveryProblem& p, const Vector& x);

/// Coordinate-wise central differences of risk_value with step h.
Vector finite_difference_gradient(const RecoveryProblem& p, const Vector& x, double h);

/// Reusable buffers for repeated risk/direction evaluation at one problem.
/// Not thread-safe; use one per thread.
class RiskEvaluator {
 public:
  explicit RiskEvaluator(const RecoveryProblem& p);

  /// Forward pass and residual at x; returns f(x). Subsequent direction()
  /// calls refer to this point.
  double evaluate(std::span<const double> x);
  /// Lambda_x^T A^T r for the last evaluated x.
  void direction(std::span<double> out);

 private:
  const RecoveryProblem* problem_;
  ForwardPass pass_;
  Vector residual_;
  Vector pulled_back_;
};

}  // namespace gencs
