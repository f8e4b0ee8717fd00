#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gencs/generator.hpp"
#include "gencs/risk.hpp"
#include "gencs/solver.hpp"

namespace gencs {

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Synthetic recovery protocol: Gaussian generator weights N(0, 1/n_i),
/// Gaussian A with N(0, 1/m) entries, standard normal x_* and noise
/// direction, noise scaled to hit an SNR of 10 log10(|A G(x_*)| / |e|).
struct ExperimentConfig {
  std::vector<std::size_t> k_values{5};
  std::vector<std::size_t> layers{250, 600};  // n_1 .. n_d
  std::size_t m = 150;
  std::vector<double> snr_db{kNoiseless};
  int trials = 30;
  std::uint64_t base_seed = 1;
  /// initial_point and init_seed are ignored; each trial supplies its own.
  SolverConfig solver;
  double success_threshold = 1e-3;
  /// Worker threads for trial-level parallelism; 0 = hardware concurrency.
  unsigned threads = 0;

  int depth() const noexcept { return static_cast<int>(layers.size()); }
  void validate() const;
};

/// Seeds for every random component of one problem instance, derived from a
/// single instance seed.
struct ProblemSeeds {
  std::uint64_t network;
  std::uint64_t measurement;
  std::uint64_t ground_truth;
  std::uint64_t noise;
  std::uint64_t init;
  std::uint64_t perturbation;
};

ProblemSeeds derive_problem_seeds(std::uint64_t instance_seed);

/// Instance seed of trial t at latent dimension k. It does not depend on the
/// SNR, so every noise level of a trial shares A, W_i, x_* and x_0.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t k, int trial);

GeneratorSpec problem_generator_spec(std::size_t k, const std::vector<std::size_t>& layers,
                                     std::uint64_t instance_seed);

/// snr_db = +inf gives e = 0 exactly.
RecoveryProblem make_problem(std::size_t k, const std::vector<std::size_t>& layers, std::size_t m,
                             double snr_db, std::uint64_t instance_seed);

struct TrialResult {
  std::size_t k = 0;
  double snr_db = kNoiseless;
  int trial = 0;
  std::uint64_t seed = 0;
  double rel_err = 0.0;
  int iterations = 0;
  bool success = false;
  TerminationReason reason = TerminationReason::MaxIterations;
};

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t k, double snr_db, int trial);

struct SweepRow {
  std::size_t k = 0;
  double snr_db = kNoiseless;
  int trials = 0;
  int successes = 0;
  double success_prob = 0.0;
  /// Mean relative error over successful trials only; NaN if none succeeded.
  double mean_rel_err_successful = std::numeric_limits<double>::quiet_NaN();
};

struct SweepTable {
  std::vector<SweepRow> rows;        // ordered by k, then by position in the SNR list
  std::vector<TrialResult> trials;   // ordered by k, SNR, trial index
};

/// Aggregates trial results per (k, snr) cell. Order of the input does not
/// affect the output.
SweepTable aggregate_trials(std::vector<TrialResult> trials, const std::vector<std::size_t>& k_values,
                            const std::vector<double>& snr_db);

/// Noiseless sweep over cfg.k_values. cfg.snr_db is ignored.
SweepTable success_sweep(const ExperimentConfig& cfg);

/// Sweep over every (k, snr) in the config.
SweepTable noise_error_sweep(const ExperimentConfig& cfg);

struct SnrTrace {
  double snr_db = kNoiseless;
  IterateTrace trace;
};

/// Runs trial 0 at cfg.k_values.front() once per SNR level with identical
/// x_0, x_*, A and W_i; only the noise magnitude differs.
std::vector<SnrTrace> convergence_trace(const ExperimentConfig& cfg);

struct NegationEscapeReport {
  std::size_t k = 0;
  int trials = 0;
  double perturbation_scale = 0.0;
  int successes_with_check = 0;
  int successes_without_check = 0;
  std::vector<double> rel_err_with_check;
  std::vector<double> rel_err_without_check;

  double success_rate_with_check() const { return double(successes_with_check) / trials; }
  double success_rate_without_check() const { return double(successes_without_check) / trials; }
};

/// Starts each noiseless trial from -rho_d x_* + delta, |delta| =
/// perturbation_scale |x_*|, and solves with the negation check on and off.
NegationEscapeReport negation_escape_test(const ExperimentConfig& cfg, double perturbation_scale);

struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log(rel_err) against iteration index over records
/// [first, last). Records without rel_err are skipped.
LogLinearFit fit_log_error(const IterateTrace& trace, std::size_t first, std::size_t last);

/// Median relative error over the final `window` records of a trace.
double plateau_error(const IterateTrace& trace, std::size_t window = 10);

/// Parses the JSON form of ExperimentConfig. Recognized keys: k (list),
/// layers, m, snr_db (numbers or "inf"), trials, base_seed,
/// success_threshold, threads, solver {step_size (number or "default"),
/// max_iters, grad_tol (number or "machine_epsilon"), negation_check}.
/// Unknown keys are ignored. A missing k list becomes {2, 4, ..., m}.
/// Throws std::invalid_argument on malformed input.
ExperimentConfig experiment_config_from_json(std::string_view text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

/// {2, 4, ..., m}
std::vector<std::size_t> default_k_grid(std::size_t m);

std::string format_snr(double snr_db);
void write_sweep_csv(std::ostream& out, const SweepTable& table);
void write_trials_csv(std::ostream& out, const SweepTable& table);

}  // namespace gencs
