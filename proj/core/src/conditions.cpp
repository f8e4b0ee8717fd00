#include "gencs/conditions.hpp"

#include <stdexcept>

#include "gencs/io.hpp"
#include "gencs/landscape.hpp"
#include "gencs/parallel.hpp"
#include "json.hpp"

namespace gencs {

std::string to_string(ConditionKind kind) { return kind == ConditionKind::WDC ? "WDC" : "RRIC"; }

double wdc_pair_deviation(const Matrix& w, const Vector& x, const Vector& y) {
  const std::size_t k = w.cols();
  if (x.size() != k || y.size() != k)
    throw std::invalid_argument("wdc_pair_deviation: sample dimension does not match W");
  Matrix gram = q_matrix(x, y);
  gram *= -1.0;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto row = w.row(i);
    if (!(dot(row, x.span()) > 0.0) || !(dot(row, y.span()) > 0.0)) continue;
    for (std::size_t r = 0; r < k; ++r) {
      auto out = gram.row(r);
      for (std::size_t c = 0; c < k; ++c) out[c] += row[r] * row[c];
    }
  }
  // k x k and symmetric: near-degenerate top singular pairs show up in about
  // one sample in a thousand, so allow a long run and settle for the last
  // power-iteration estimate, which never exceeds the true norm.
  try {
    return spectral_norm(gram, {.tol = 1e-10, .max_iter = 200000});
  } catch (const ConvergenceError& e) {
    return e.last_estimate();
  }
}

namespace {

Vector unit(std::size_t dim, std::size_t axis, double sign = 1.0) {
  Vector e(dim);
  e[axis] = sign;
  return e;
}

void finish_report(ConditionReport& report, const std::vector<double>& values,
                   const std::vector<std::vector<Vector>>& points) {
  bool found = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) continue;
    report.deviations.push_back({i, values[i]});
    if (!found || values[i] > report.max_deviation) {
      found = true;
      report.max_deviation = values[i];
      report.argmax_index = i;
    }
  }
  if (!found)
    throw DegenerateSamplingError(to_string(report.kind) +
                                  " estimator: every sampled point was degenerate");
  report.witness = points[report.argmax_index];
}

}  // namespace

ConditionReport wdc_deviation(const Matrix& w, int num_samples, Rng& rng, unsigned threads) {
  if (num_samples < 1) throw std::invalid_argument("wdc_deviation: num_samples must be >= 1");
  if (w.rows() == 0 || w.cols() == 0) throw std::invalid_argument("wdc_deviation: empty W");
  const std::size_t k = w.cols();

  ConditionReport report;
  report.kind = ConditionKind::WDC;
  report.samples = num_samples;
  report.seed = rng.seed();

  // Draw every sample up front, in order, so the set for n samples is a
  // prefix of the set for n + 1 regardless of how evaluation is scheduled.
  std::vector<std::vector<Vector>> pairs;
  pairs.push_back({unit(k, 0), unit(k, 0)});
  pairs.push_back({unit(k, 0), unit(k, 0, -1.0)});
  if (k >= 2) pairs.push_back({unit(k, 0), unit(k, 1)});
  for (int s = 0; s < num_samples; ++s) {
    Vector x = sphere_sample(k, rng);
    Vector y = sphere_sample(k, rng);
    pairs.push_back({std::move(x), std::move(y)});
  }

  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), threads,
               [&](std::size_t i) { values[i] = wdc_pair_deviation(w, pairs[i][0], pairs[i][1]); });
  finish_report(report, values, pairs);
  return report;
}

double rric_tuple_deviation(const Matrix& a, const GeneratorNetwork& net, const Vector& x1,
                            const Vector& x2, const Vector& x3, const Vector& x4) {
  if (a.cols() != net.output_dim())
    throw std::invalid_argument("rric_tuple_deviation: A does not match generator output");
  const Vector u = forward(net, x1).output - forward(net, x2).output;
  const Vector v = forward(net, x3).output - forward(net, x4).output;
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < 1e-12 || nv < 1e-12) return -1.0;
  const double measured = dot(multiply(a, u), multiply(a, v));
  return std::abs(measured - dot(u, v)) / (nu * nv);
}

ConditionReport rric_deviation(const Matrix& a, const GeneratorNetwork& net, int num_samples,
                               Rng& rng, unsigned threads) {
  if (num_samples < 1) throw std::invalid_argument("rric_deviation: num_samples must be >= 1");
  if (a.cols() != net.output_dim())
    throw std::invalid_argument("rric_deviation: A has " + std::to_string(a.cols()) +
                                " columns, generator output is " + std::to_string(net.output_dim()));
  const std::size_t k = net.input_dim();

  ConditionReport report;
  report.kind = ConditionKind::RRIC;
  report.samples = num_samples;
  report.seed = rng.seed();

  std::vector<std::vector<Vector>> tuples;
  tuples.reserve(static_cast<std::size_t>(num_samples));
  for (int s = 0; s < num_samples; ++s) {
    std::vector<Vector> t;
    for (int j = 0; j < 4; ++j) t.push_back(sphere_sample(k, rng));
    tuples.push_back(std::move(t));
  }

  std::vector<double> values(tuples.size());
  parallel_for(tuples.size(), threads, [&](std::size_t i) {
    const auto& t = tuples[i];
    values[i] = rric_tuple_deviation(a, net, t[0], t[1], t[2], t[3]);
  });
  finish_report(report, values, tuples);
  return report;
}

std::string summary_json(const ConditionReport& report) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(report.kind);
  j["samples"] = report.samples;
  j["max_deviation"] = round_to_significant(report.max_deviation);
  j["seed"] = report.seed;
  j["argmax_index"] = report.argmax_index;
  j["lower_bound_only"] = true;
  return j.dump(2) + "\n";
}

}  // namespace gencs
