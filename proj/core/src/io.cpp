#include "gencs/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace gencs {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.11e", value);
  return buf.data();
}

double round_to_significant(double value) {
  if (!std::isfinite(value)) return value;
  return std::strtod(format_real(value).c_str(), nullptr);
}

void write_trace_csv(std::ostream& out, const IterateTrace& trace) {
  out << "iter,f,grad_norm,negated,rel_err\n";
  for (const auto& r : trace.records) {
    out << r.index << ',' << format_real(r.f) << ',' << format_real(r.grad_norm) << ','
        << (r.negated ? 1 : 0) << ',';
    if (r.rel_err) out << format_real(*r.rel_err);
    out << '\n';
  }
}

void write_condition_csv(std::ostream& out, const ConditionReport& report) {
  out << "sample_index,deviation\n";
  for (const auto& s : report.deviations) out << s.index << ',' << format_real(s.deviation) << '\n';
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '&': r += "&amp;"; break;
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

std::string fmt_coord(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return buf.data();
}

std::string fmt_tick(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.3g", v);
  return buf.data();
}

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

void write_svg_plot(std::ostream& out, const std::vector<PlotSeries>& series,
                    const PlotOptions& opt) {
  const double left = 70, right = 150, top = 40, bottom = 50;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;

  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!opt.log_y || y > 0.0);
  };
  auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  if (opt.log_y) ymin = std::floor(ymin), ymax = std::ceil(ymax);

  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + ph - (ty(y) - ymin) / (ymax - ymin) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
      << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt_coord(left + pw / 2) << "\" y=\"20\" text-anchor=\"middle\">"
      << escape_xml(opt.title) << "</text>\n";
  out << "<rect x=\"" << fmt_coord(left) << "\" y=\"" << fmt_coord(top) << "\" width=\""
      << fmt_coord(pw) << "\" height=\"" << fmt_coord(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  // y ticks: decades on log axes, five even steps otherwise
  std::vector<double> yticks;
  if (opt.log_y) {
    const int step = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / 8)));
    for (double e = ymin; e <= ymax + 1e-9; e += step) yticks.push_back(e);
  } else {
    for (int i = 0; i <= 5; ++i) yticks.push_back(ymin + (ymax - ymin) * i / 5.0);
  }
  for (double t : yticks) {
    const double yy = top + ph - (t - ymin) / (ymax - ymin) * ph;
    const std::string label = opt.log_y ? "1e" + std::to_string(static_cast<int>(t)) : fmt_tick(t);
    out << "<line x1=\"" << fmt_coord(left - 4) << "\" y1=\"" << fmt_coord(yy) << "\" x2=\""
        << fmt_coord(left) << "\" y2=\"" << fmt_coord(yy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt_coord(left - 6) << "\" y=\"" << fmt_coord(yy + 4)
        << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double t = xmin + (xmax - xmin) * i / 5.0;
    const double xx = px(t);
    out << "<line x1=\"" << fmt_coord(xx) << "\" y1=\"" << fmt_coord(top + ph) << "\" x2=\""
        << fmt_coord(xx) << "\" y2=\"" << fmt_coord(top + ph + 4) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt_coord(xx) << "\" y=\"" << fmt_coord(top + ph + 18)
        << "\" text-anchor=\"middle\">" << fmt_tick(t) << "</text>\n";
  }
  out << "<text x=\"" << fmt_coord(left + pw / 2) << "\" y=\"" << fmt_coord(opt.height - 10.0)
      << "\" text-anchor=\"middle\">" << escape_xml(opt.x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << fmt_coord(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(opt.y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % kPalette.size()];
    std::string points;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      points += fmt_coord(px(s.x[i])) + "," + fmt_coord(py(s.y[i])) + " ";
    }
    if (!points.empty()) points.pop_back();
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << points << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(si);
    out << "<line x1=\"" << fmt_coord(left + pw + 10) << "\" y1=\"" << fmt_coord(ly - 4)
        << "\" x2=\"" << fmt_coord(left + pw + 30) << "\" y2=\"" << fmt_coord(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt_coord(left + pw + 34) << "\" y=\"" << fmt_coord(ly) << "\">"
        << escape_xml(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace gencs
