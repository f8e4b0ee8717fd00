#include "gencs/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace gencs {

void SolverConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    throw std::invalid_argument("SolverConfig: step_size must be positive");
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(grad_tol >= 0.0)) throw std::invalid_argument("SolverConfig: grad_tol must be >= 0");
  if (initial_point && !initial_point->all_finite())
    throw std::invalid_argument("SolverConfig: initial point must be finite");
}

double default_step_size(int depth) {
  if (depth < 1) throw std::invalid_argument("default_step_size: depth must be >= 1");
  const double d = depth;
  return std::ldexp(1.0, depth) / (d * d);
}

std::string to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::GradientTolerance:
      return "gradient-tol";
    case TerminationReason::MaxIterations:
      return "max-iters";
  }
  return "unknown";
}

Vector default_initial_point(std::size_t latent_dim, std::uint64_t seed) {
  Rng rng(seed);
  return gaussian_vector(latent_dim, 1.0 / static_cast<double>(latent_dim), rng);
}

namespace {

// Deterministic nudge away from the origin, where v is undefined.
void perturb_from_origin(Vector& x, double scale, std::uint64_t seed, int index) {
  Rng rng(mix_seed(seed, {0xD15EA5EULL, static_cast<std::uint64_t>(index)}));
  Vector dir = sphere_sample(x.size(), rng);
  x += (1e-12 * scale) * dir;
}

bool bit_equal(const Vector& a, const Vector& b) { return a.values() == b.values(); }

}  // namespace

SolveResult solve(const RecoveryProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t k = p.latent_dim();

  Vector x = cfg.initial_point ? *cfg.initial_point : default_initial_point(k, cfg.init_seed);
  if (x.size() != k)
    throw std::invalid_argument("solve: initial point has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(k));

  const std::optional<Vector>& truth = p.ground_truth;
  const double truth_norm = truth ? truth->norm() : 0.0;
  const double perturb_scale = truth_norm > 0.0 ? truth_norm : std::max(x.norm(), 1.0);

  RiskEvaluator at_x(p);
  RiskEvaluator at_neg(p);
  Vector neg_x(k);
  Vector v(k);

  IterateTrace trace;
  trace.records.reserve(static_cast<std::size_t>(std::min(cfg.max_iters, 100000)) + 1);

  for (int i = 0;; ++i) {
    IterateRecord rec;
    rec.index = i;
    if (x.is_zero()) {
      perturb_from_origin(x, perturb_scale, cfg.init_seed, i);
      rec.perturbed = true;
    }

    double fx = at_x.evaluate(x.span());
    RiskEvaluator* accepted = &at_x;
    if (cfg.negation_check) {
      for (std::size_t j = 0; j < k; ++j) neg_x[j] = -x[j];
      const double fneg = at_neg.evaluate(neg_x.span());
      if (fneg < fx) {
        x = neg_x;
        fx = fneg;
        accepted = &at_neg;
        rec.negated = true;
      }
    }

    accepted->direction(v.span());
    rec.f = fx;
    rec.grad_norm = v.norm();
    if (truth_norm > 0.0) rec.rel_err = (x - *truth).norm() / truth_norm;
    if (!std::isfinite(rec.f) || !v.all_finite()) {
      trace.records.push_back(rec);
      throw DivergedError("solve: non-finite objective or direction at iteration " +
                              std::to_string(i),
                          std::move(trace));
    }
    trace.records.push_back(rec);

    if (rec.grad_norm < cfg.grad_tol) {
      trace.reason = TerminationReason::GradientTolerance;
      break;
    }
    if (i == cfg.max_iters) {
      trace.reason = TerminationReason::MaxIterations;
      break;
    }

    Vector next = x;
    for (std::size_t j = 0; j < k; ++j) next[j] -= cfg.step_size * v[j];

    // The update is a deterministic function of the iterate. Once it maps an
    // iterate onto itself bit for bit, every later record is a copy of this one.
    if (!rec.negated && !rec.perturbed && bit_equal(next, x)) {
      for (int j = i + 1; j <= cfg.max_iters; ++j) {
        IterateRecord copy = rec;
        copy.index = j;
        trace.records.push_back(copy);
      }
      trace.reason = TerminationReason::MaxIterations;
      break;
    }
    x = std::move(next);
  }

  ForwardResult out = forward(p.net, x);
  return SolveResult{std::move(x), std::move(trace), std::move(out.output)};
}

}  // namespace gencs
