#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gencs/experiments.hpp"
#include "gencs/landscape.hpp"

namespace gencs {
namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.k_values = {3, 6};
  c.layers = {40, 80};
  c.m = 30;
  c.snr_db = {40.0, kNoiseless};
  c.trials = 3;
  c.base_seed = 11;
  c.solver.max_iters = 400;
  c.threads = 2;
  return c;
}

TEST(MakeProblem, NoiselessIsExact) {
  const auto p = make_problem(5, {30, 60}, 20, kNoiseless, 1);
  EXPECT_TRUE(p.noise->is_zero());
  EXPECT_EQ(p.observation, multiply(p.measurement, forward(p.net, *p.ground_truth).output));
}

TEST(MakeProblem, SnrSetsNoiseNorm) {
  for (double snr : {40.0, 80.0, 120.0}) {
    const auto p = make_problem(5, {30, 60}, 20, snr, 2);
    const double signal = multiply(p.measurement, forward(p.net, *p.ground_truth).output).norm();
    EXPECT_NEAR(p.noise->norm(), signal * std::pow(10.0, -snr / 10.0), 1e-12 * signal);
    EXPECT_NEAR(10.0 * std::log10(signal / p.noise->norm()), snr, 1e-9);
  }
}

TEST(MakeProblem, SharedRandomnessAcrossSnr) {
  const auto a = make_problem(5, {30, 60}, 20, 40.0, 3);
  const auto b = make_problem(5, {30, 60}, 20, kNoiseless, 3);
  EXPECT_EQ(a.net.weights(), b.net.weights());
  EXPECT_EQ(a.measurement, b.measurement);
  EXPECT_EQ(*a.ground_truth, *b.ground_truth);
}

TEST(MakeProblem, Deterministic) {
  const auto a = make_problem(5, {30, 60}, 20, 80.0, 4);
  const auto b = make_problem(5, {30, 60}, 20, 80.0, 4);
  EXPECT_EQ(a.observation, b.observation);
  EXPECT_EQ(a.measurement, b.measurement);
  EXPECT_THROW(make_problem(0, {30}, 20, 80.0, 4), std::invalid_argument);
  EXPECT_THROW(make_problem(5, {30}, 20, std::nan(""), 4), std::invalid_argument);
}

TEST(Seeds, DerivedSeedsDistinct) {
  const auto s = derive_problem_seeds(5);
  const std::vector<std::uint64_t> all{s.network, s.measurement, s.ground_truth,
                                       s.noise, s.init, s.perturbation};
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) EXPECT_NE(all[i], all[j]);
  EXPECT_NE(trial_seed(1, 5, 0), trial_seed(1, 5, 1));
  EXPECT_NE(trial_seed(1, 5, 0), trial_seed(1, 6, 0));
  EXPECT_NE(trial_seed(1, 5, 0), trial_seed(2, 5, 0));
}

TEST(Sweep, DeterministicAndThreadIndependent) {
  ExperimentConfig c = tiny_config();
  const auto a = noise_error_sweep(c);
  c.threads = 1;
  const auto b = noise_error_sweep(c);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    EXPECT_EQ(a.trials[i].rel_err, b.trials[i].rel_err);
    EXPECT_EQ(a.trials[i].seed, b.trials[i].seed);
  }
  std::ostringstream sa, sb;
  write_sweep_csv(sa, a);
  write_sweep_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Sweep, CellReproducibleInIsolation) {
  const ExperimentConfig c = tiny_config();
  const auto table = noise_error_sweep(c);
  for (const auto& t : table.trials) {
    const TrialResult again = run_trial(c, t.k, t.snr_db, t.trial);
    EXPECT_EQ(again.rel_err, t.rel_err);
    EXPECT_EQ(again.iterations, t.iterations);
  }
}

TEST(Sweep, RowsOrderedAndCounted) {
  const ExperimentConfig c = tiny_config();
  const auto table = noise_error_sweep(c);
  ASSERT_EQ(table.rows.size(), 4u);
  EXPECT_EQ(table.rows[0].k, 3u);
  EXPECT_EQ(table.rows[0].snr_db, 40.0);
  EXPECT_TRUE(std::isinf(table.rows[1].snr_db));
  EXPECT_EQ(table.rows[2].k, 6u);
  for (const auto& r : table.rows) {
    EXPECT_EQ(r.trials, 3);
    EXPECT_DOUBLE_EQ(r.success_prob, r.successes / 3.0);
  }
}

TEST(Sweep, NoiselessColumnMatchesSuccessSweep) {
  const ExperimentConfig c = tiny_config();
  const auto noisy = noise_error_sweep(c);
  const auto clean = success_sweep(c);
  for (const auto& row : clean.rows) {
    const auto it = std::find_if(noisy.rows.begin(), noisy.rows.end(), [&](const SweepRow& r) {
      return r.k == row.k && std::isinf(r.snr_db);
    });
    ASSERT_NE(it, noisy.rows.end());
    EXPECT_EQ(it->successes, row.successes);
    if (row.successes > 0) {
      EXPECT_EQ(it->mean_rel_err_successful, row.mean_rel_err_successful);
    }
  }
}

TEST(Aggregate, PermutationInvariant) {
  std::vector<TrialResult> trials;
  for (std::size_t k : {2u, 4u})
    for (double s : {40.0, kNoiseless})
      for (int t = 0; t < 5; ++t) {
        TrialResult r;
        r.k = k;
        r.snr_db = s;
        r.trial = t;
        r.rel_err = 1e-4 * (t + 1) * static_cast<double>(k) + (std::isinf(s) ? 0.0 : 2e-4 * t);
        r.success = t != 3;
        trials.push_back(r);
      }
  const std::vector<std::size_t> ks{2, 4};
  const std::vector<double> snrs{40.0, kNoiseless};
  const auto ref = aggregate_trials(trials, ks, snrs);
  std::mt19937 shuffle(1);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(trials.begin(), trials.end(), shuffle);
    const auto t = aggregate_trials(trials, ks, snrs);
    ASSERT_EQ(t.rows.size(), ref.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      EXPECT_EQ(t.rows[i].successes, ref.rows[i].successes);
      EXPECT_EQ(t.rows[i].mean_rel_err_successful, ref.rows[i].mean_rel_err_successful);
    }
    for (std::size_t i = 0; i < t.trials.size(); ++i) EXPECT_EQ(t.trials[i].rel_err, ref.trials[i].rel_err);
  }
  EXPECT_EQ(ref.rows[0].successes, 4);
  EXPECT_EQ(ref.rows[0].trials, 5);
}

TEST(Aggregate, NoSuccessGivesNaNMean) {
  TrialResult r;
  r.k = 3;
  r.rel_err = 0.5;
  const auto t = aggregate_trials({r}, {3}, {kNoiseless});
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_TRUE(std::isnan(t.rows[0].mean_rel_err_successful));
  std::ostringstream os;
  write_sweep_csv(os, t);
  EXPECT_EQ(os.str(),
            "k,snr_db,trials,successes,success_prob,mean_rel_err_successful\n"
            "3,inf,1,0,0.00000000000e+00,nan\n");
}

TEST(ConvergenceTrace, SharedStartAcrossSnr) {
  ExperimentConfig c = tiny_config();
  c.k_values = {4};
  c.snr_db = {40.0, 80.0, kNoiseless};
  c.solver.max_iters = 2000;
  const auto traces = convergence_trace(c);
  ASSERT_EQ(traces.size(), 3u);
  // identical x_0 and x_*, so the first relative error matches exactly
  EXPECT_EQ(traces[0].trace.records[0].rel_err, traces[2].trace.records[0].rel_err);
  EXPECT_GT(plateau_error(traces[0].trace), plateau_error(traces[1].trace));
  EXPECT_GT(plateau_error(traces[1].trace), plateau_error(traces[2].trace));
}

TEST(NegationEscape, SmallStartNearTruthBothArmsSucceed) {
  ExperimentConfig c = tiny_config();
  c.k_values = {3};
  c.trials = 4;
  c.solver.max_iters = 3000;
  const auto r = negation_escape_test(c, 0.01);
  EXPECT_EQ(r.trials, 4);
  EXPECT_EQ(r.rel_err_with_check.size(), 4u);
  EXPECT_GE(r.successes_with_check, r.successes_without_check);
  EXPECT_THROW(negation_escape_test(c, -1.0), std::invalid_argument);
}

TEST(LogFit, ExactExponential) {
  IterateTrace t;
  for (int i = 0; i < 50; ++i) {
    IterateRecord r;
    r.index = i;
    r.rel_err = 2.0 * std::exp(-0.3 * i);
    t.records.push_back(r);
  }
  const auto fit = fit_log_error(t, 10, 40);
  EXPECT_EQ(fit.points, 30u);
  EXPECT_NEAR(fit.slope, -0.3, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(2.0), 1e-10);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(plateau_error(t, 3), 2.0 * std::exp(-0.3 * 48));
}

TEST(ConfigJson, RoundTripAndDefaults) {
  const std::string text = R"({
    "k": [5, 10], "layers": [250, 600], "m": 150, "snr_db": [40, "inf"],
    "trials": 7, "base_seed": 3, "success_threshold": 0.001, "threads": 2,
    "solver": {"step_size": "default", "max_iters": 100, "grad_tol": "machine_epsilon",
               "negation_check": false}})";
  const ExperimentConfig c = experiment_config_from_json(text);
  EXPECT_EQ(c.k_values, (std::vector<std::size_t>{5, 10}));
  EXPECT_EQ(c.snr_db[0], 40.0);
  EXPECT_TRUE(std::isinf(c.snr_db[1]));
  EXPECT_EQ(c.trials, 7);
  EXPECT_DOUBLE_EQ(c.solver.step_size, 1.0);
  EXPECT_EQ(c.solver.grad_tol, std::numeric_limits<double>::epsilon());
  EXPECT_FALSE(c.solver.negation_check);

  const ExperimentConfig again = experiment_config_from_json(experiment_config_to_json(c));
  EXPECT_EQ(again.k_values, c.k_values);
  EXPECT_EQ(again.layers, c.layers);
  EXPECT_EQ(again.m, c.m);
  EXPECT_EQ(again.trials, c.trials);
  EXPECT_EQ(again.base_seed, c.base_seed);
  EXPECT_EQ(again.solver.max_iters, c.solver.max_iters);
  EXPECT_EQ(again.solver.grad_tol, c.solver.grad_tol);

  const ExperimentConfig no_k = experiment_config_from_json(R"({"m": 10})");
  EXPECT_EQ(no_k.k_values, (std::vector<std::size_t>{2, 4, 6, 8, 10}));
}

TEST(ConfigJson, Errors) {
  EXPECT_THROW(experiment_config_from_json("[1]"), std::invalid_argument);
  EXPECT_THROW(experiment_config_from_json("{oops"), std::invalid_argument);
  EXPECT_THROW(experiment_config_from_json(R"({"snr_db": ["loud"]})"), std::invalid_argument);
  EXPECT_THROW(experiment_config_from_json(R"({"m": "many"})"), std::invalid_argument);
}

TEST(ExperimentConfig, Validate) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.trials = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.k_values.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.snr_db = {std::nan("")};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(TrialsCsv, Header) {
  const auto t = aggregate_trials({}, {3}, {kNoiseless});
  std::ostringstream os;
  write_trials_csv(os, t);
  EXPECT_EQ(os.str(), "k,snr_db,trial,seed,rel_err,iterations,success,termination\n");
  EXPECT_EQ(format_snr(kNoiseless), "inf");
}

}  // namespace
}  // namespace gencs
