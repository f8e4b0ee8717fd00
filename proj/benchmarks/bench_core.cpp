#include <benchmark/benchmark.h>

#include <map>

#include "gencs/conditions.hpp"
#include "gencs/experiments.hpp"
#include "gencs/risk.hpp"
#include "gencs/solver.hpp"

namespace {

using namespace gencs;

const RecoveryProblem& reference_problem(std::size_t k) {
  static std::map<std::size_t, RecoveryProblem> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, make_problem(k, {250, 600}, 150, kNoiseless, 1)).first;
  return it->second;
}

void BM_Forward(benchmark::State& state) {
  const auto& p = reference_problem(static_cast<std::size_t>(state.range(0)));
  ForwardPass pass(p.net);
  const Vector x = default_initial_point(p.latent_dim(), 3);
  for (auto _ : state) {
    pass.run(p.net, x.span());
    benchmark::DoNotOptimize(pass.output().data());
  }
}
BENCHMARK(BM_Forward)->Arg(5)->Arg(50)->Arg(150);

void BM_StepDirection(benchmark::State& state) {
  const auto& p = reference_problem(static_cast<std::size_t>(state.range(0)));
  RiskEvaluator ev(p);
  const Vector x = default_initial_point(p.latent_dim(), 3);
  Vector v(p.latent_dim());
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.evaluate(x.span()));
    ev.direction(v.span());
    benchmark::DoNotOptimize(v.span().data());
  }
}
BENCHMARK(BM_StepDirection)->Arg(5)->Arg(50)->Arg(150);

// Fixed iteration budget with the tolerance disabled, so the time per
// iteration is comparable across k.
void BM_SolveIterations(benchmark::State& state) {
  const auto& p = reference_problem(static_cast<std::size_t>(state.range(0)));
  SolverConfig cfg;
  cfg.max_iters = 100;
  cfg.grad_tol = 0.0;
  cfg.init_seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, cfg).x_hat.values().data());
  state.SetItemsProcessed(state.iterations() * cfg.max_iters);
}
BENCHMARK(BM_SolveIterations)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SpectralNorm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Matrix m = gaussian_matrix(n, n, 1.0 / static_cast<double>(n), rng);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_norm(m));
}
BENCHMARK(BM_SpectralNorm)->Arg(5)->Arg(50)->Arg(200);

void BM_WdcDeviation(benchmark::State& state) {
  Rng wr(2);
  const Matrix w = gaussian_matrix(2000, 5, 1.0 / 2000, wr);
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(wdc_deviation(w, 50, rng).max_deviation);
  }
}
BENCHMARK(BM_WdcDeviation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
