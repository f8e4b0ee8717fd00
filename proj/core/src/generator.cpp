#include "gencs/generator.hpp"

#include <stdexcept>

#include "json.hpp"

namespace gencs {

GeneratorNetwork::GeneratorNetwork(std::vector<Matrix> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("GeneratorNetwork: depth must be >= 1");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i].rows() == 0 || weights_[i].cols() == 0)
      throw std::invalid_argument("GeneratorNetwork: empty layer " + std::to_string(i + 1));
    if (i > 0 && weights_[i].cols() != weights_[i - 1].rows())
      throw std::invalid_argument("GeneratorNetwork: layer " + std::to_string(i + 1) +
                                  " does not chain with layer " + std::to_string(i));
  }
}

std::vector<std::size_t> GeneratorNetwork::dims() const {
  std::vector<std::size_t> d{input_dim()};
  for (const auto& w : weights_) d.push_back(w.rows());
  return d;
}

ForwardPass::ForwardPass(const GeneratorNetwork& net) {
  activations_.emplace_back(net.input_dim());
  for (const auto& w : net.weights()) {
    activations_.emplace_back(w.rows());
    scratch_.emplace_back(w.cols());
  }
}

void ForwardPass::run(const GeneratorNetwork& net, std::span<const double> x) {
  if (activations_.size() != net.depth() + 1) *this = ForwardPass(net);
  if (x.size() != net.input_dim())
    throw std::invalid_argument("forward: input has dimension " + std::to_string(x.size()) +
                                ", network expects " + std::to_string(net.input_dim()));
  std::copy(x.begin(), x.end(), activations_[0].span().begin());
  for (std::size_t i = 0; i < net.depth(); ++i) {
    auto out = activations_[i + 1].span();
    gemv(net.layer(i), activations_[i].span(), out);
    for (double& v : out) v = v > 0.0 ? v : 0.0;
  }
}

ActivationPattern ForwardPass::pattern() const {
  ActivationPattern p;
  p.masks.reserve(activations_.size() - 1);
  for (std::size_t i = 1; i < activations_.size(); ++i) {
    const auto a = activations_[i].span();
    std::vector<bool> mask(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) mask[j] = a[j] > 0.0;
    p.masks.push_back(std::move(mask));
  }
  return p;
}

void ForwardPass::apply_active_transposed(const GeneratorNetwork& net, std::span<const double> u,
                                          std::span<double> out) {
  const std::size_t d = net.depth();
  // Walk layers top-down, masking by the recorded activations; relu output is
  // positive exactly where the pre-activation was.
  std::vector<double> current(u.begin(), u.end());
  for (std::size_t i = d; i-- > 0;) {
    const auto act = activations_[i + 1].span();
    for (std::size_t j = 0; j < current.size(); ++j)
      if (!(act[j] > 0.0)) current[j] = 0.0;
    auto next = scratch_[i].span();
    gemv_transposed(net.layer(i), current, next);
    current.assign(next.begin(), next.end());
  }
  std::copy(current.begin(), current.end(), out.begin());
}

ForwardResult forward(const GeneratorNetwork& net, const Vector& x) {
  ForwardPass pass(net);
  pass.run(net, x.span());
  const auto out = pass.output();
  return {Vector(std::vector<double>(out.begin(), out.end())), pass.pattern()};
}

Matrix masked_weights(const Matrix& w, const Vector& preactivation) {
  if (w.rows() != preactivation.size())
    throw std::invalid_argument("masked_weights: preactivation has dimension " +
                                std::to_string(preactivation.size()) + ", expected " +
                                std::to_string(w.rows()));
  Matrix m = w;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    if (!(preactivation[r] > 0.0)) {
      auto row = m.row(r);
      std::fill(row.begin(), row.end(), 0.0);
    }
  }
  return m;
}

Matrix active_product(const GeneratorNetwork& net, const Vector& x) {
  if (x.size() != net.input_dim())
    throw std::invalid_argument("active_product: input has dimension " + std::to_string(x.size()) +
                                ", network expects " + std::to_string(net.input_dim()));
  Matrix product = Matrix::identity(net.input_dim());
  Vector a = x;
  for (const auto& w : net.weights()) {
    const Vector pre = multiply(w, a);
    product = multiply(masked_weights(w, pre), product);
    a = pre;
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = a[j] > 0.0 ? a[j] : 0.0;
  }
  return product;
}

GeneratorNetwork make_generator(const GeneratorSpec& spec) {
  if (spec.variance_rule != "one_over_rows")
    throw std::invalid_argument("make_generator: unknown variance rule '" + spec.variance_rule + "'");
  if (spec.dims.size() < 2) throw std::invalid_argument("make_generator: need at least [k, n_1]");
  std::vector<Matrix> weights;
  weights.reserve(spec.dims.size() - 1);
  for (std::size_t i = 1; i < spec.dims.size(); ++i) {
    const std::size_t rows = spec.dims[i];
    const std::size_t cols = spec.dims[i - 1];
    if (rows == 0 || cols == 0) throw std::invalid_argument("make_generator: zero layer width");
    Rng rng = Rng::substream(spec.seed, {i});
    weights.push_back(gaussian_matrix(rows, cols, 1.0 / static_cast<double>(rows), rng));
  }
  return GeneratorNetwork(std::move(weights));
}

std::string to_json(const GeneratorSpec& spec) {
  nlohmann::ordered_json j;
  j["dims"] = spec.dims;
  j["seed"] = spec.seed;
  j["variance_rule"] = spec.variance_rule;
  return j.dump();
}

GeneratorSpec generator_spec_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("generator spec: ") + e.what());
  }
  GeneratorSpec spec;
  try {
    spec.dims = j.at("dims").get<std::vector<std::size_t>>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.variance_rule = j.value("variance_rule", std::string("one_over_rows"));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("generator spec: ") + e.what());
  }
  if (spec.variance_rule != "one_over_rows")
    throw std::invalid_argument("generator spec: unknown variance rule '" + spec.variance_rule + "'");
  if (spec.dims.size() < 2) throw std::invalid_argument("generator spec: dims needs at least [k, n_1]");
  return spec;
}

}  // namespace gencs
