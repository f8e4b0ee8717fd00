#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gencs/numerics.hpp"

namespace gencs {

/// Bias-free ReLU network G(x) = relu(W_d ... relu(W_1 x)).
/// weights[i] has shape n_{i+1} x n_i with n_0 = input_dim.
class GeneratorNetwork {
 public:
  /// Throws std::invalid_argument if the list is empty, any layer is empty,
  /// or consecutive shapes do not chain.
  explicit GeneratorNetwork(std::vector<Matrix> weights);

  std::size_t depth() const noexcept { return weights_.size(); }
  std::size_t input_dim() const noexcept { return weights_.front().cols(); }
  std::size_t output_dim() const noexcept { return weights_.back().rows(); }
  /// [k, n_1, ..., n_d]
  std::vector<std::size_t> dims() const;

  const Matrix& layer(std::size_t i) const { return weights_.at(i); }
  const std::vector<Matrix>& weights() const noexcept { return weights_; }

 private:
  std::vector<Matrix> weights_;
};

/// Strict-positivity masks, one per layer: masks[i][j] is true iff the j-th
/// pre-activation of layer i+1 is > 0. A pre-activation of exactly 0 is
/// treated as inactive.
struct ActivationPattern {
  std::vector<std::vector<bool>> masks;

  friend bool operator==(const ActivationPattern&, const ActivationPattern&) = default;
};

struct ForwardResult {
  Vector output;
  ActivationPattern pattern;
};

ForwardResult forward(const GeneratorNetwork& net, const Vector& x);

/// W with row j zeroed whenever preactivation[j] <= 0.
Matrix masked_weights(const Matrix& w, const Vector& preactivation);

/// Lambda_x = W_{d,+,x} ... W_{1,+,x}, an n x k matrix. Diagnostics only;
/// hot paths apply the masked layers one at a time through ForwardPass.
Matrix active_product(const GeneratorNetwork& net, const Vector& x);

/// Layer activations kept around for a backward sweep.
/// activations[0] is the input and activations[i] = relu(W_i activations[i-1]).
class ForwardPass {
 public:
  ForwardPass() = default;
  explicit ForwardPass(const GeneratorNetwork& net);

  void run(const GeneratorNetwork& net, std::span<const double> x);

  std::span<const double> output() const noexcept { return activations_.back().span(); }
  const Vector& activation(std::size_t layer) const { return activations_.at(layer); }
  ActivationPattern pattern() const;

  /// out = Lambda_x^T u for the pattern recorded by the last run.
  void apply_active_transposed(const GeneratorNetwork& net, std::span<const double> u,
                               std::span<double> out);

 private:
  std::vector<Vector> activations_;
  std::vector<Vector> scratch_;
};

/// Seed-based network description. Weights are regenerated, never stored:
/// layer i draws N(0, 1/n_i) entries (n_i = its row count) from
/// Rng::substream(seed, {i}).
struct GeneratorSpec {
  std::vector<std::size_t> dims;  // [k, n_1, ..., n_d]
  std::uint64_t seed = 0;
  std::string variance_rule = "one_over_rows";

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

GeneratorNetwork make_generator(const GeneratorSpec& spec);

std::string to_json(const GeneratorSpec& spec);
/// Throws std::invalid_argument on malformed documents or unknown variance rules.
GeneratorSpec generator_spec_from_json(std::string_view text);

}  // namespace gencs
