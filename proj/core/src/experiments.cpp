#include "gencs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "gencs/io.hpp"
#include "gencs/landscape.hpp"
#include "gencs/parallel.hpp"
#include "json.hpp"

namespace gencs {

void ExperimentConfig::validate() const {
  if (k_values.empty()) throw std::invalid_argument("ExperimentConfig: k list is empty");
  for (auto k : k_values)
    if (k == 0) throw std::invalid_argument("ExperimentConfig: k must be >= 1");
  if (layers.empty()) throw std::invalid_argument("ExperimentConfig: need at least one layer");
  for (auto n : layers)
    if (n == 0) throw std::invalid_argument("ExperimentConfig: layer widths must be >= 1");
  if (m == 0) throw std::invalid_argument("ExperimentConfig: m must be >= 1");
  if (snr_db.empty()) throw std::invalid_argument("ExperimentConfig: SNR list is empty");
  for (double s : snr_db)
    if (std::isnan(s) || s == -std::numeric_limits<double>::infinity())
      throw std::invalid_argument("ExperimentConfig: SNR must be a number or +inf");
  if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
  if (!(success_threshold > 0.0))
    throw std::invalid_argument("ExperimentConfig: success_threshold must be positive");
  solver.validate();
}

ProblemSeeds derive_problem_seeds(std::uint64_t s) {
  return {mix_seed(s, {1}), mix_seed(s, {2}), mix_seed(s, {3}),
          mix_seed(s, {4}), mix_seed(s, {5}), mix_seed(s, {6})};
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t k, int trial) {
  return mix_seed(base_seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(trial)});
}

GeneratorSpec problem_generator_spec(std::size_t k, const std::vector<std::size_t>& layers,
                                     std::uint64_t instance_seed) {
  GeneratorSpec spec;
  spec.dims.push_back(k);
  spec.dims.insert(spec.dims.end(), layers.begin(), layers.end());
  spec.seed = derive_problem_seeds(instance_seed).network;
  return spec;
}

RecoveryProblem make_problem(std::size_t k, const std::vector<std::size_t>& layers, std::size_t m,
                             double snr_db, std::uint64_t instance_seed) {
  if (k == 0 || m == 0 || layers.empty())
    throw std::invalid_argument("make_problem: k, m and the layer list must be nonempty");
  if (std::isnan(snr_db)) throw std::invalid_argument("make_problem: SNR is NaN");
  const ProblemSeeds seeds = derive_problem_seeds(instance_seed);

  GeneratorNetwork net = make_generator(problem_generator_spec(k, layers, instance_seed));
  Rng a_rng(seeds.measurement);
  Matrix a = gaussian_matrix(m, net.output_dim(), 1.0 / static_cast<double>(m), a_rng);
  Rng x_rng(seeds.ground_truth);
  Vector xstar = gaussian_vector(k, 1.0, x_rng);

  Vector clean = multiply(a, forward(net, xstar).output);
  Vector noise(m);
  if (std::isfinite(snr_db)) {
    Rng e_rng(seeds.noise);
    Vector direction = gaussian_vector(m, 1.0, e_rng);
    const double tau = clean.norm() * std::pow(10.0, -snr_db / 10.0);
    noise = (tau / direction.norm()) * direction;
  }
  Vector y = clean + noise;
  return RecoveryProblem(std::move(net), std::move(a), std::move(y), std::move(xstar),
                         std::move(noise));
}

namespace {

SolverConfig trial_solver(const ExperimentConfig& cfg, std::uint64_t instance_seed) {
  SolverConfig s = cfg.solver;
  s.initial_point.reset();
  s.init_seed = derive_problem_seeds(instance_seed).init;
  return s;
}

int iterations_used(const IterateTrace& t) { return static_cast<int>(t.records.size()) - 1; }

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t k, double snr_db, int trial) {
  const std::uint64_t seed = trial_seed(cfg.base_seed, k, trial);
  const RecoveryProblem p = make_problem(k, cfg.layers, cfg.m, snr_db, seed);
  TrialResult r;
  r.k = k;
  r.snr_db = snr_db;
  r.trial = trial;
  r.seed = seed;
  try {
    const SolveResult out = solve(p, trial_solver(cfg, seed));
    r.rel_err = (out.x_hat - *p.ground_truth).norm() / p.ground_truth->norm();
    r.iterations = iterations_used(out.trace);
    r.reason = out.trace.reason;
  } catch (const DivergedError& e) {
    r.rel_err = std::numeric_limits<double>::infinity();
    r.iterations = iterations_used(e.trace());
    r.reason = e.trace().reason;
  }
  r.success = r.rel_err < cfg.success_threshold;
  return r;
}

SweepTable aggregate_trials(std::vector<TrialResult> trials, const std::vector<std::size_t>& k_values,
                            const std::vector<double>& snr_db) {
  auto k_pos = [&](std::size_t k) {
    return std::find(k_values.begin(), k_values.end(), k) - k_values.begin();
  };
  auto s_pos = [&](double s) { return std::find(snr_db.begin(), snr_db.end(), s) - snr_db.begin(); };
  std::sort(trials.begin(), trials.end(), [&](const TrialResult& a, const TrialResult& b) {
    return std::tuple(k_pos(a.k), s_pos(a.snr_db), a.trial) <
           std::tuple(k_pos(b.k), s_pos(b.snr_db), b.trial);
  });

  SweepTable table;
  for (std::size_t k : k_values) {
    for (double s : snr_db) {
      SweepRow row;
      row.k = k;
      row.snr_db = s;
      double sum = 0.0;
      for (const auto& t : trials) {
        if (t.k != k || t.snr_db != s) continue;
        ++row.trials;
        if (t.success) {
          ++row.successes;
          sum += t.rel_err;
        }
      }
      if (row.trials == 0) continue;
      row.success_prob = double(row.successes) / row.trials;
      if (row.successes > 0) row.mean_rel_err_successful = sum / row.successes;
      table.rows.push_back(row);
    }
  }
  table.trials = std::move(trials);
  return table;
}

namespace {

SweepTable run_sweep(const ExperimentConfig& cfg, const std::vector<double>& snrs) {
  cfg.validate();
  struct Cell {
    std::size_t k;
    double snr;
    int trial;
  };
  std::vector<Cell> cells;
  for (std::size_t k : cfg.k_values)
    for (double s : snrs)
      for (int t = 0; t < cfg.trials; ++t) cells.push_back({k, s, t});

  std::vector<TrialResult> results(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    results[i] = run_trial(cfg, cells[i].k, cells[i].snr, cells[i].trial);
  });
  return aggregate_trials(std::move(results), cfg.k_values, snrs);
}

}  // namespace

SweepTable success_sweep(const ExperimentConfig& cfg) { return run_sweep(cfg, {kNoiseless}); }

SweepTable noise_error_sweep(const ExperimentConfig& cfg) { return run_sweep(cfg, cfg.snr_db); }

std::vector<SnrTrace> convergence_trace(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t k = cfg.k_values.front();
  const std::uint64_t seed = trial_seed(cfg.base_seed, k, 0);
  std::vector<SnrTrace> out(cfg.snr_db.size());
  parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
    const RecoveryProblem p = make_problem(k, cfg.layers, cfg.m, cfg.snr_db[i], seed);
    out[i].snr_db = cfg.snr_db[i];
    try {
      out[i].trace = solve(p, trial_solver(cfg, seed)).trace;
    } catch (const DivergedError& e) {
      out[i].trace = e.trace();
    }
  });
  return out;
}

NegationEscapeReport negation_escape_test(const ExperimentConfig& cfg, double perturbation_scale) {
  cfg.validate();
  if (!(perturbation_scale >= 0.0))
    throw std::invalid_argument("negation_escape_test: perturbation scale must be >= 0");
  const std::size_t k = cfg.k_values.front();
  const double rho_d = rho(cfg.depth());

  NegationEscapeReport report;
  report.k = k;
  report.trials = cfg.trials;
  report.perturbation_scale = perturbation_scale;
  report.rel_err_with_check.resize(static_cast<std::size_t>(cfg.trials));
  report.rel_err_without_check.resize(static_cast<std::size_t>(cfg.trials));

  // Two solves per trial, one per arm, laid out as 2t and 2t+1.
  parallel_for(2 * static_cast<std::size_t>(cfg.trials), cfg.threads, [&](std::size_t job) {
    const int t = static_cast<int>(job / 2);
    const bool with_check = job % 2 == 0;
    const std::uint64_t seed = trial_seed(cfg.base_seed, k, t);
    const RecoveryProblem p = make_problem(k, cfg.layers, cfg.m, kNoiseless, seed);
    const Vector& xstar = *p.ground_truth;

    Rng rng(derive_problem_seeds(seed).perturbation);
    const Vector delta = (perturbation_scale * xstar.norm()) * sphere_sample(k, rng);
    SolverConfig s = trial_solver(cfg, seed);
    s.initial_point = -rho_d * xstar + delta;
    s.negation_check = with_check;

    double err = std::numeric_limits<double>::infinity();
    try {
      const SolveResult out = solve(p, s);
      err = (out.x_hat - xstar).norm() / xstar.norm();
    } catch (const DivergedError&) {
    }
    (with_check ? report.rel_err_with_check : report.rel_err_without_check)[t] = err;
  });
  for (int t = 0; t < cfg.trials; ++t) {
    if (report.rel_err_with_check[t] < cfg.success_threshold) ++report.successes_with_check;
    if (report.rel_err_without_check[t] < cfg.success_threshold) ++report.successes_without_check;
  }
  return report;
}

LogLinearFit fit_log_error(const IterateTrace& trace, std::size_t first, std::size_t last) {
  last = std::min(last, trace.records.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = first; i < last; ++i) {
    const auto& r = trace.records[i];
    if (!r.rel_err || !(*r.rel_err > 0.0)) continue;
    pts.emplace_back(r.index, std::log(*r.rel_err));
  }
  LogLinearFit fit;
  fit.points = pts.size();
  if (pts.size() < 2) return fit;
  const double n = static_cast<double>(pts.size());
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (auto [x, y] : pts) {
    const double e = y - (fit.intercept + fit.slope * x);
    ss_res += e * e;
    ss_tot += (y - mean) * (y - mean);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double plateau_error(const IterateTrace& trace, std::size_t window) {
  std::vector<double> tail;
  const std::size_t n = trace.records.size();
  for (std::size_t i = n > window ? n - window : 0; i < n; ++i)
    if (trace.records[i].rel_err) tail.push_back(*trace.records[i].rel_err);
  if (tail.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
  return tail[tail.size() / 2];
}

std::vector<std::size_t> default_k_grid(std::size_t m) {
  std::vector<std::size_t> ks;
  for (std::size_t k = 2; k <= m; k += 2) ks.push_back(k);
  if (ks.empty()) ks.push_back(1);
  return ks;
}

namespace {

double parse_snr(const nlohmann::json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "INF") return kNoiseless;
    throw std::invalid_argument("config: SNR string must be \"inf\", got \"" + s + "\"");
  }
  if (!v.is_number()) throw std::invalid_argument("config: SNR must be a number or \"inf\"");
  return v.get<double>();
}

}  // namespace

ExperimentConfig experiment_config_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  ExperimentConfig cfg;
  try {
    if (j.contains("layers")) cfg.layers = j["layers"].get<std::vector<std::size_t>>();
    if (j.contains("m")) cfg.m = j["m"].get<std::size_t>();
    cfg.k_values = j.contains("k") ? j["k"].get<std::vector<std::size_t>>() : default_k_grid(cfg.m);
    if (j.contains("snr_db")) {
      cfg.snr_db.clear();
      for (const auto& v : j["snr_db"]) cfg.snr_db.push_back(parse_snr(v));
    }
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("success_threshold")) cfg.success_threshold = j["success_threshold"].get<double>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();

    bool default_step = true;
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      if (s.contains("step_size") && !(s["step_size"].is_string() && s["step_size"] == "default")) {
        cfg.solver.step_size = s["step_size"].get<double>();
        default_step = false;
      }
      if (s.contains("max_iters")) cfg.solver.max_iters = s["max_iters"].get<int>();
      if (s.contains("grad_tol") && !(s["grad_tol"].is_string() && s["grad_tol"] == "machine_epsilon"))
        cfg.solver.grad_tol = s["grad_tol"].get<double>();
      if (s.contains("negation_check")) cfg.solver.negation_check = s["negation_check"].get<bool>();
    }
    if (default_step) {
      if (cfg.layers.empty()) throw std::invalid_argument("config: need at least one layer");
      cfg.solver.step_size = default_step_size(cfg.depth());
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["k"] = cfg.k_values;
  j["layers"] = cfg.layers;
  j["m"] = cfg.m;
  auto snrs = nlohmann::ordered_json::array();
  for (double s : cfg.snr_db) {
    if (std::isinf(s)) snrs.push_back("inf");
    else snrs.push_back(s);
  }
  j["snr_db"] = snrs;
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["success_threshold"] = cfg.success_threshold;
  j["threads"] = cfg.threads;
  j["solver"] = {{"step_size", cfg.solver.step_size},
                 {"max_iters", cfg.solver.max_iters},
                 {"grad_tol", cfg.solver.grad_tol},
                 {"negation_check", cfg.solver.negation_check}};
  return j.dump(2);
}

std::string format_snr(double snr_db) {
  if (std::isinf(snr_db)) return "inf";
  return format_real(snr_db);
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "k,snr_db,trials,successes,success_prob,mean_rel_err_successful\n";
  for (const auto& r : table.rows) {
    out << r.k << ',' << format_snr(r.snr_db) << ',' << r.trials << ',' << r.successes << ','
        << format_real(r.success_prob) << ',' << format_real(r.mean_rel_err_successful) << '\n';
  }
}

void write_trials_csv(std::ostream& out, const SweepTable& table) {
  out << "k,snr_db,trial,seed,rel_err,iterations,success,termination\n";
  for (const auto& t : table.trials) {
    out << t.k << ',' << format_snr(t.snr_db) << ',' << t.trial << ',' << t.seed << ','
        << format_real(t.rel_err) << ',' << t.iterations << ',' << (t.success ? 1 : 0) << ','
        << to_string(t.reason) << '\n';
  }
}

}  // namespace gencs
