#include "gencs/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gencs {

namespace {

constexpr double kPi = std::numbers::pi;

void require_depth(int depth, const char* what) {
  if (depth < 1) throw std::invalid_argument(std::string(what) + ": depth must be >= 1");
}

void require_nonzero(const Vector& v, const char* what) {
  if (v.is_zero()) throw std::invalid_argument(std::string(what) + ": input must be nonzero");
}

// Sum_{i} sin(theta_i)/pi * prod_{j>i} (pi - theta_j)/pi, and the full
// product prod_i (pi - theta_i)/pi.
struct AngleSums {
  double full_product = 1.0;
  double sine_sum = 0.0;
};

AngleSums angle_sums(const std::vector<double>& thetas) {
  AngleSums s;
  // Walk from the top so the tail products accumulate in one pass.
  double tail = 1.0;
  for (std::size_t i = thetas.size(); i-- > 0;) {
    s.sine_sum += std::sin(thetas[i]) / kPi * tail;
    tail *= (kPi - thetas[i]) / kPi;
  }
  s.full_product = tail;
  return s;
}

}  // namespace

double g_theta(double theta) {
  if (!(theta >= 0.0 && theta <= kPi))
    throw std::invalid_argument("g_theta: theta must lie in [0, pi]");
  const double arg = std::clamp(((kPi - theta) * std::cos(theta) + std::sin(theta)) / kPi, -1.0, 1.0);
  // acos loses half the digits as arg -> 1 (theta -> 0), so recover the sine
  // from 1 - arg = (pi (1 - cos t) + t cos t - sin t) / pi computed without
  // cancellation.
  double t_cos_minus_sin;
  if (theta < 1e-2) {
    const double t2 = theta * theta;
    t_cos_minus_sin = -theta * t2 * (1.0 / 3.0 - t2 * (1.0 / 30.0 - t2 / 840.0));
  } else {
    t_cos_minus_sin = theta * std::cos(theta) - std::sin(theta);
  }
  const double half_sin = std::sin(0.5 * theta);
  const double one_minus_arg =
      std::clamp((2.0 * kPi * half_sin * half_sin + t_cos_minus_sin) / kPi, 0.0, 2.0);
  return std::atan2(std::sqrt(one_minus_arg * (1.0 + arg)), arg);
}

std::vector<double> theta_sequence(double theta0, int depth) {
  require_depth(depth, "theta_sequence");
  std::vector<double> seq;
  seq.reserve(static_cast<std::size_t>(depth));
  seq.push_back(theta0);
  (void)g_theta(theta0);  // range check
  for (int i = 1; i < depth; ++i) seq.push_back(g_theta(seq.back()));
  return seq;
}

double angle_between(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("angle_between: dimension mismatch");
  require_nonzero(x, "angle_between");
  require_nonzero(y, "angle_between");
  const Vector xh = x * (1.0 / x.norm());
  const Vector yh = y * (1.0 / y.norm());
  const double c = dot(xh, yh);
  const double s = (yh - c * xh).norm();
  return std::atan2(s, c);
}

LandscapeEval evaluate_landscape(const Vector& x, const Vector& y, int depth) {
  require_depth(depth, "evaluate_landscape");
  require_nonzero(x, "evaluate_landscape");
  require_nonzero(y, "evaluate_landscape");
  if (x.size() != y.size()) throw std::invalid_argument("evaluate_landscape: dimension mismatch");

  LandscapeEval out;
  out.depth = depth;
  out.theta_bars = theta_sequence(angle_between(x, y), depth);
  const AngleSums sums = angle_sums(out.theta_bars);

  const double inv_scale = std::ldexp(1.0, -depth);
  const Vector xh = x * (1.0 / x.norm());
  out.h_tilde = (inv_scale * sums.full_product) * y + (inv_scale * sums.sine_sum * y.norm()) * xh;
  out.h = inv_scale * x - out.h_tilde;
  out.f_expected = 0.5 * inv_scale * x.squared_norm() - dot(x, out.h_tilde) +
                   0.5 * inv_scale * y.squared_norm();
  return out;
}

Vector h_direction(const Vector& x, const Vector& y, int depth) {
  return evaluate_landscape(x, y, depth).h;
}

double expected_risk(const Vector& x, const Vector& xstar, int depth) {
  require_depth(depth, "expected_risk");
  require_nonzero(xstar, "expected_risk");
  if (x.size() != xstar.size()) throw std::invalid_argument("expected_risk: dimension mismatch");
  if (x.is_zero()) return std::ldexp(xstar.squared_norm(), -(depth + 1));
  return evaluate_landscape(x, xstar, depth).f_expected;
}

std::vector<double> rho_angles(int depth) { return theta_sequence(kPi, depth); }

double rho(int depth) {
  require_depth(depth, "rho");
  return angle_sums(rho_angles(depth)).sine_sum;
}

RhoTable rho_table(int max_depth) {
  require_depth(max_depth, "rho_table");
  RhoTable t;
  for (int d = 1; d <= max_depth; ++d) {
    t.depths.push_back(d);
    t.rho.push_back(rho(d));
  }
  return t;
}

Matrix q_matrix(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("q_matrix: dimension mismatch");
  require_nonzero(x, "q_matrix");
  require_nonzero(y, "q_matrix");
  const std::size_t k = x.size();
  const Vector xh = x * (1.0 / x.norm());
  const Vector yh = y * (1.0 / y.norm());
  const double c = dot(xh, yh);
  Vector perp = yh - c * xh;
  const double s = perp.norm();
  const double theta = std::atan2(s, c);

  // Swap map in the orthonormal basis e1 = x^, e2 = perp^:
  //   M = cos(theta) (e1 e1^T - e2 e2^T) + sin(theta) (e1 e2^T + e2 e1^T)
  Matrix swap = std::cos(theta) * outer(xh, xh);
  if (s > 0.0) {
    perp *= 1.0 / s;
    swap -= std::cos(theta) * outer(perp, perp);
    swap += std::sin(theta) * (outer(xh, perp) + outer(perp, xh));
  }

  Matrix q = ((kPi - theta) / (2.0 * kPi)) * Matrix::identity(k);
  q += (std::sin(theta) / (2.0 * kPi)) * swap;
  return q;
}

}  // namespace gencs
