#include "gencs/risk.hpp"

#include <stdexcept>
#include <string>

namespace gencs {

RecoveryProblem::RecoveryProblem(GeneratorNetwork net_, Matrix measurement_, Vector observation_,
                                 std::optional<Vector> ground_truth_, std::optional<Vector> noise_)
    : net(std::move(net_)),
      measurement(std::move(measurement_)),
      observation(std::move(observation_)),
      ground_truth(std::move(ground_truth_)),
      noise(std::move(noise_)) {
  if (measurement.cols() != net.output_dim())
    throw std::invalid_argument("RecoveryProblem: A has " + std::to_string(measurement.cols()) +
                                " columns, generator output is " + std::to_string(net.output_dim()));
  if (observation.size() != measurement.rows())
    throw std::invalid_argument("RecoveryProblem: y has dimension " +
                                std::to_string(observation.size()) + ", A has " +
                                std::to_string(measurement.rows()) + " rows");
  if (ground_truth && ground_truth->size() != net.input_dim())
    throw std::invalid_argument("RecoveryProblem: ground truth dimension mismatch");
  if (noise && noise->size() != measurement.rows())
    throw std::invalid_argument("RecoveryProblem: noise dimension mismatch");
}

RecoveryProblem RecoveryProblem::from_ground_truth(GeneratorNetwork net, Matrix measurement,
                                                   Vector ground_truth, std::optional<Vector> noise) {
  if (ground_truth.size() != net.input_dim())
    throw std::invalid_argument("RecoveryProblem: ground truth dimension mismatch");
  if (measurement.cols() != net.output_dim())
    throw std::invalid_argument("RecoveryProblem: A does not match generator output");
  Vector y = multiply(measurement, forward(net, ground_truth).output);
  if (noise) y += *noise;
  return RecoveryProblem(std::move(net), std::move(measurement), std::move(y),
                         std::move(ground_truth), std::move(noise));
}

RiskEvaluator::RiskEvaluator(const RecoveryProblem& p)
    : problem_(&p),
      pass_(p.net),
      residual_(p.num_measurements()),
      pulled_back_(p.net.output_dim()) {}

double RiskEvaluator::evaluate(std::span<const double> x) {
  pass_.run(problem_->net, x);
  auto r = residual_.span();
  gemv(problem_->measurement, pass_.output(), r);
  const auto y = problem_->observation.span();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
  return 0.5 * dot(r, r);
}

void RiskEvaluator::direction(std::span<double> out) {
  gemv_transposed(problem_->measurement, residual_.span(), pulled_back_.span());
  pass_.apply_active_transposed(problem_->net, pulled_back_.span(), out);
}

namespace {

void check_latent(const RecoveryProblem& p, const Vector& x, const char* what) {
  if (x.size() != p.latent_dim())
    throw std::invalid_argument(std::string(what) + ": x has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(p.latent_dim()));
}

}  // namespace

double risk_value(const RecoveryProblem& p, const Vector& x) {
  check_latent(p, x, "risk_value");
  RiskEvaluator eval(p);
  return eval.evaluate(x.span());
}

Vector step_direction(const RecoveryProblem& p, const Vector& x) {
  check_latent(p, x, "step_direction");
  if (x.is_zero()) throw std::invalid_argument("step_direction: x must be nonzero");
  RiskEvaluator eval(p);
  eval.evaluate(x.span());
  Vector v(p.latent_dim());
  eval.direction(v.span());
  return v;
}

Vector finite_difference_gradient(const RecoveryProblem& p, const Vector& x, double h) {
  check_latent(p, x, "finite_difference_gradient");
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: h must be positive");
  RiskEvaluator eval(p);
  Vector grad(x.size());
  Vector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = eval.evaluate(probe.span());
    probe[i] = x[i] - h;
    const double down = eval.evaluate(probe.span());
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace gencs
