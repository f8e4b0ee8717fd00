#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "gencs/conditions.hpp"
#include "gencs/solver.hpp"

namespace gencs {

/// Scientific notation with 12 significant digits ("%.11e"); non-finite values
/// print as "inf", "-inf" or "nan".
std::string format_real(double value);

/// value rounded to 12 significant digits, for JSON emission.
double round_to_significant(double value);

/// CSV with header iter,f,grad_norm,negated,rel_err. rel_err is empty when the
/// ground truth is unknown.
void write_trace_csv(std::ostream& out, const IterateTrace& trace);

/// CSV with header sample_index,deviation.
void write_condition_csv(std::ostream& out, const ConditionReport& report);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Minimal standalone SVG line chart. Non-finite points (and non-positive
/// ones on a log axis) are skipped.
void write_svg_plot(std::ostream& out, const std::vector<PlotSeries>& series,
                    const PlotOptions& options);

}  // namespace gencs
