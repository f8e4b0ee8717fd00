#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "gencs/conditions.hpp"
#include "gencs/experiments.hpp"
#include "gencs/io.hpp"
#include "gencs/landscape.hpp"
#include "json.hpp"

namespace gencs::cli {

namespace {

namespace fs = std::filesystem;

// Configuration problems detected before any work starts.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string dims;
  std::string k;
  std::string layers;
  std::optional<std::size_t> m;
  std::string snr;
  std::optional<int> trials;
  std::string out_dir;
  std::optional<unsigned> threads;
  std::optional<int> samples;
  int layer = 1;
  int max_d = 50;
  bool svg = false;
  std::optional<double> step_size;
  std::optional<int> max_iters;
  bool no_negation = false;
};

struct Resolved {
  std::string subcommand;
  ExperimentConfig cfg;
  int num_samples = kDefaultConditionSamples;
  int layer = 1;
  int max_d = 50;
  bool svg = false;
  fs::path out_dir;
};

// filename -> contents, written together at the end
using Outputs = std::map<std::string, std::string>;

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::size_t parse_size(const std::string& s, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-')
    throw UsageError(std::string(what) + ": expected a positive integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_size_list(const std::string& s, const char* what) {
  std::vector<std::size_t> out;
  for (const auto& p : split(s)) out.push_back(parse_size(p, what));
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

std::vector<double> parse_snr_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s)) {
    if (p == "inf" || p == "Inf" || p == "INF") {
      out.push_back(kNoiseless);
      continue;
    }
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(p, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != p.size() || !std::isfinite(v)) throw UsageError("--snr: cannot parse '" + p + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--snr: empty list");
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Resolved resolve(const std::string& subcommand, const Flags& f) {
  Resolved r;
  r.subcommand = subcommand;
  r.layer = f.layer;
  r.max_d = f.max_d;
  r.svg = f.svg;

  nlohmann::json raw = nlohmann::json::object();
  if (!f.config_path.empty()) {
    const std::string text = read_file(f.config_path);
    try {
      r.cfg = experiment_config_from_json(text);
      raw = nlohmann::json::parse(text);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (raw.contains("num_samples")) {
      if (!raw["num_samples"].is_number_integer()) throw UsageError("config: num_samples must be an integer");
      r.num_samples = raw["num_samples"].get<int>();
    }
  }

  ExperimentConfig& c = r.cfg;
  const bool layers_changed = !f.layers.empty() || !f.dims.empty();
  if (!f.dims.empty()) {
    const auto d = parse_size_list(f.dims, "--dims");
    if (d.size() < 2) throw UsageError("--dims: expected k,n_1,...,n_d");
    c.k_values = {d.front()};
    c.layers.assign(d.begin() + 1, d.end());
  }
  if (!f.k.empty()) c.k_values = parse_size_list(f.k, "--k");
  if (!f.layers.empty()) c.layers = parse_size_list(f.layers, "--layers");
  if (f.m) c.m = *f.m;
  if (!f.snr.empty()) c.snr_db = parse_snr_list(f.snr);
  if (f.trials) c.trials = *f.trials;
  if (f.seed) c.base_seed = *f.seed;
  if (f.threads) c.threads = *f.threads;
  if (f.samples) r.num_samples = *f.samples;
  if (f.max_iters) c.solver.max_iters = *f.max_iters;
  if (f.no_negation) c.solver.negation_check = false;
  if (f.step_size) {
    c.solver.step_size = *f.step_size;
  } else if (layers_changed) {
    c.solver.step_size = default_step_size(static_cast<int>(c.layers.size()));
  }

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (r.num_samples < 1) throw UsageError("num_samples must be >= 1");
  if (r.max_d < 1) throw UsageError("--max-d must be >= 1");
  if (r.layer < 1 || static_cast<std::size_t>(r.layer) > c.layers.size())
    throw UsageError("--layer must be between 1 and the network depth");

  if (!f.out_dir.empty()) {
    r.out_dir = f.out_dir;
  } else if (const char* env = std::getenv("GENCS_OUT_DIR"); env && *env) {
    r.out_dir = env;
  } else {
    r.out_dir = "gencs_out";
  }
  return r;
}

std::string snr_label(double snr) {
  if (std::isinf(snr)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", snr);
  return buf;
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream ss;
  fn(ss);
  return ss.str();
}

nlohmann::ordered_json rounded(const Vector& v) {
  auto arr = nlohmann::ordered_json::array();
  for (double x : v.values()) arr.push_back(round_to_significant(x));
  return arr;
}

// ---------------------------------------------------------------- subcommands

void cmd_recover(const Resolved& r, Outputs& outputs, std::ostream& out) {
  const ExperimentConfig& c = r.cfg;
  const std::size_t k = c.k_values.front();
  const double snr = c.snr_db.front();
  const std::uint64_t seed = trial_seed(c.base_seed, k, 0);
  const RecoveryProblem p = make_problem(k, c.layers, c.m, snr, seed);
  SolverConfig s = c.solver;
  s.init_seed = derive_problem_seeds(seed).init;
  const SolveResult res = solve(p, s);  // DivergedError propagates as a runtime failure
  const double rel = (res.x_hat - *p.ground_truth).norm() / p.ground_truth->norm();

  nlohmann::ordered_json j;
  j["k"] = k;
  j["snr_db"] = snr_label(snr);
  j["instance_seed"] = seed;
  j["rel_err"] = round_to_significant(rel);
  j["success"] = rel < c.success_threshold;
  j["iterations"] = res.trace.records.size() - 1;
  j["termination"] = to_string(res.trace.reason);
  j["x_hat"] = rounded(res.x_hat);
  j["x_star"] = rounded(*p.ground_truth);
  j["network"] = nlohmann::ordered_json::parse(to_json(problem_generator_spec(k, c.layers, seed)));

  outputs["recover_trace.csv"] = render([&](std::ostream& o) { write_trace_csv(o, res.trace); });
  outputs["recover_result.json"] = j.dump(2) + "\n";
  out << "recover: k=" << k << " snr=" << snr_label(snr) << " rel_err=" << format_real(rel)
      << " iterations=" << res.trace.records.size() - 1 << " (" << to_string(res.trace.reason)
      << ")\n";
}

void cmd_sweep(const Resolved& r, Outputs& outputs, std::ostream& out, bool noisy) {
  const SweepTable table = noisy ? noise_error_sweep(r.cfg) : success_sweep(r.cfg);
  const std::string stem = noisy ? "sweep_noise" : "sweep_success";
  outputs[stem + ".csv"] = render([&](std::ostream& o) { write_sweep_csv(o, table); });
  outputs[stem + "_trials.csv"] = render([&](std::ostream& o) { write_trials_csv(o, table); });

  if (r.svg) {
    std::vector<PlotSeries> series;
    const std::vector<double> snrs = noisy ? r.cfg.snr_db : std::vector<double>{kNoiseless};
    for (double s : snrs) {
      PlotSeries ps;
      ps.label = "SNR " + snr_label(s);
      for (const auto& row : table.rows) {
        if (row.snr_db != s) continue;
        ps.x.push_back(static_cast<double>(row.k));
        ps.y.push_back(noisy ? row.mean_rel_err_successful : row.success_prob);
      }
      series.push_back(std::move(ps));
    }
    PlotOptions opt;
    opt.title = noisy ? "Relative error of successful runs" : "Empirical success probability";
    opt.x_label = "k";
    opt.y_label = noisy ? "relative error" : "success probability";
    opt.log_y = noisy;
    outputs[stem + ".svg"] = render([&](std::ostream& o) { write_svg_plot(o, series, opt); });
  }
  for (const auto& row : table.rows) {
    out << stem << ": k=" << row.k << " snr=" << snr_label(row.snr_db) << " success="
        << row.successes << "/" << row.trials << " mean_rel_err="
        << format_real(row.mean_rel_err_successful) << "\n";
  }
}

void cmd_trace(const Resolved& r, Outputs& outputs, std::ostream& out) {
  const auto traces = convergence_trace(r.cfg);
  std::vector<PlotSeries> series;
  for (const auto& t : traces) {
    const std::string name = "trace_snr_" + snr_label(t.snr_db) + ".csv";
    outputs[name] = render([&](std::ostream& o) { write_trace_csv(o, t.trace); });
    PlotSeries ps;
    ps.label = "SNR " + snr_label(t.snr_db);
    for (const auto& rec : t.trace.records) {
      ps.x.push_back(rec.index);
      ps.y.push_back(rec.rel_err.value_or(std::nan("")));
    }
    series.push_back(std::move(ps));
    out << "trace: snr=" << snr_label(t.snr_db) << " iterations=" << t.trace.records.size() - 1
        << " final_rel_err=" << format_real(plateau_error(t.trace, 1)) << "\n";
  }
  if (r.svg) {
    PlotOptions opt;
    opt.title = "Relative error per iteration (k=" + std::to_string(r.cfg.k_values.front()) + ")";
    opt.x_label = "iteration";
    opt.y_label = "relative error";
    opt.log_y = true;
    outputs["trace.svg"] = render([&](std::ostream& o) { write_svg_plot(o, series, opt); });
  }
}

void cmd_check(const Resolved& r, Outputs& outputs, std::ostream& out, ConditionKind kind) {
  const ExperimentConfig& c = r.cfg;
  const std::size_t k = c.k_values.front();
  const std::uint64_t seed = trial_seed(c.base_seed, k, 0);
  ConditionReport report;
  std::string stem;
  if (kind == ConditionKind::WDC) {
    const GeneratorNetwork net = make_generator(problem_generator_spec(k, c.layers, seed));
    Rng rng(mix_seed(c.base_seed, {0x57DCULL, static_cast<std::uint64_t>(r.layer)}));
    report = wdc_deviation(net.layer(static_cast<std::size_t>(r.layer - 1)), r.num_samples, rng,
                           c.threads);
    stem = "wdc";
  } else {
    const RecoveryProblem p = make_problem(k, c.layers, c.m, kNoiseless, seed);
    Rng rng(mix_seed(c.base_seed, {0x4121CULL}));
    report = rric_deviation(p.measurement, p.net, r.num_samples, rng, c.threads);
    stem = "rric";
  }
  outputs[stem + "_samples.csv"] = render([&](std::ostream& o) { write_condition_csv(o, report); });
  outputs[stem + "_summary.json"] = summary_json(report);
  out << "check-" << stem << ": sampled lower bound on the " << to_string(kind)
      << " constant = " << format_real(report.max_deviation) << " over " << report.deviations.size()
      << " samples\n";
}

void cmd_rho_table(const Resolved& r, Outputs& outputs, std::ostream& out) {
  const RhoTable t = rho_table(r.max_d);
  outputs["rho_table.csv"] = render([&](std::ostream& o) {
    o << "d,rho_d,one_minus_rho_bound\n";
    for (std::size_t i = 0; i < t.depths.size(); ++i)
      o << t.depths[i] << ',' << format_real(t.rho[i]) << ','
        << format_real(250.0 / (t.depths[i] + 1.0)) << '\n';
  });
  out << "rho-table: d=1.." << r.max_d << "\n";
}

std::string manifest(const Resolved& r, const std::vector<std::string>& args, const Outputs& outputs) {
  nlohmann::ordered_json j;
  j["subcommand"] = r.subcommand;
  j["argv"] = args;
  j["config"] = nlohmann::ordered_json::parse(experiment_config_to_json(r.cfg));
  j["num_samples"] = r.num_samples;
  j["wdc_layer"] = r.layer;
  j["max_d"] = r.max_d;
  j["output_dir"] = r.out_dir.string();
  auto files = nlohmann::ordered_json::array();
  for (const auto& [name, _] : outputs) files.push_back(name);
  j["outputs"] = files;
  return j.dump(2) + "\n";
}

void write_outputs(const fs::path& dir, const Outputs& outputs) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  for (const auto& [name, content] : outputs) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    f << content;
    if (!f) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
  }
}

void add_common_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON experiment config");
  sub->add_option("--seed", f.seed, "Base seed");
  sub->add_option("--dims", f.dims, "k,n_1,...,n_d (single k)");
  sub->add_option("--k", f.k, "Comma-separated latent dimensions");
  sub->add_option("--layers", f.layers, "Comma-separated layer widths n_1,...,n_d");
  sub->add_option("--m", f.m, "Number of measurements");
  sub->add_option("--snr", f.snr, "Comma-separated SNR levels in dB, 'inf' for noiseless");
  sub->add_option("--trials", f.trials, "Trials per (k, SNR) cell");
  sub->add_option("--out", f.out_dir, "Output directory (default $GENCS_OUT_DIR or ./gencs_out)");
  sub->add_option("--threads", f.threads, "Worker threads, 0 = all cores");
  sub->add_option("--step-size", f.step_size, "Solver step size (default 2^d/d^2)");
  sub->add_option("--max-iters", f.max_iters, "Solver iteration cap");
  sub->add_flag("--no-negation", f.no_negation, "Disable the negation check");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient-descent recovery under random ReLU generative priors", "gencs"};
  app.require_subcommand(1);
  Flags f;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"recover", "Solve one instance and write its iterate trace"},
      {"sweep-success", "Noiseless success probability versus k"},
      {"sweep-noise", "Relative error of successful runs versus k at each SNR"},
      {"trace", "Per-iteration error at every SNR with shared randomness"},
      {"check-wdc", "Sampled weight distribution deviation of one layer"},
      {"check-rric", "Sampled range restricted isometry deviation of A"},
      {"rho-table", "Table of rho_d and the 250/(d+1) bound on 1 - rho_d"},
  };
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common_flags(sub, f);
    handles.push_back(sub);
  }
  app.get_subcommand("check-wdc")->add_option("--layer", f.layer, "1-based layer index");
  for (const char* name : {"check-wdc", "check-rric"})
    app.get_subcommand(name)->add_option("--samples", f.samples, "Number of random samples");
  app.get_subcommand("rho-table")->add_option("--max-d", f.max_d, "Largest depth");
  for (const char* name : {"sweep-success", "sweep-noise", "trace"})
    app.get_subcommand(name)->add_flag("--svg", f.svg, "Also render SVG plots");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string subcommand;
  for (auto* h : handles)
    if (h->parsed()) subcommand = h->get_name();

  Resolved r;
  try {
    r = resolve(subcommand, f);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Outputs outputs;
  try {
    if (subcommand == "recover") cmd_recover(r, outputs, out);
    else if (subcommand == "sweep-success") cmd_sweep(r, outputs, out, false);
    else if (subcommand == "sweep-noise") cmd_sweep(r, outputs, out, true);
    else if (subcommand == "trace") cmd_trace(r, outputs, out);
    else if (subcommand == "check-wdc") cmd_check(r, outputs, out, ConditionKind::WDC);
    else if (subcommand == "check-rric") cmd_check(r, outputs, out, ConditionKind::RRIC);
    else if (subcommand == "rho-table") cmd_rho_table(r, outputs, out);
    outputs["run_manifest.json"] = manifest(r, args, outputs);
    write_outputs(r.out_dir, outputs);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace gencs::cli
