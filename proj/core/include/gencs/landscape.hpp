#pragma once

#include <vector>

#include "gencs/numerics.hpp"

namespace gencs {

// Closed-form expected landscape of the empirical risk for Gaussian weights
// with N(0, 1/n_i) entries and Gaussian A with N(0, 1/m) entries.

/// g(theta) = acos( ((pi - theta) cos theta + sin theta) / pi ), theta in [0, pi].
/// Throws std::invalid_argument outside [0, pi].
double g_theta(double theta);

/// [theta_0, g(theta_0), g(g(theta_0)), ...], d entries.
std::vector<double> theta_sequence(double theta0, int depth);

/// Angle between nonzero x and y in [0, pi], computed with atan2 of the
/// parallel and orthogonal components of y relative to x.
double angle_between(const Vector& x, const Vector& y);

struct LandscapeEval {
  int depth = 0;
  std::vector<double> theta_bars;  // theta_0 .. theta_{d-1}
  Vector h;                        // h_{x,y}
  Vector h_tilde;                  // h~_{x,y}
  double f_expected = 0.0;         // f^E(x) with x_* = y
};

/// Evaluates every quantity above in one pass. x and y must be nonzero.
LandscapeEval evaluate_landscape(const Vector& x, const Vector& y, int depth);

/// h_{x,y} = x / 2^d - h~_{x,y}. The expected step direction at x when the
/// target latent code is y.
Vector h_direction(const Vector& x, const Vector& y, int depth);

/// f^E(x) = |x|^2 / 2^{d+1} - x . h~_{x,x_*} + |x_*|^2 / 2^{d+1}.
/// At x = 0 returns the limit |x_*|^2 / 2^{d+1}. Throws if x_* = 0.
double expected_risk(const Vector& x, const Vector& xstar, int depth);

struct RhoTable {
  std::vector<int> depths;
  std::vector<double> rho;
};

/// rho_d, the magnitude of the spurious stationary point -rho_d x_* of f^E.
double rho(int depth);
/// theta-check sequence starting from pi, d entries.
std::vector<double> rho_angles(int depth);
RhoTable rho_table(int max_depth);

/// Q_{x,y} = (pi - theta)/(2 pi) I + sin(theta)/(2 pi) M, where M swaps x^ and
/// y^ and annihilates span{x,y}^perp. For parallel inputs M is taken as
/// cos(theta) x^ x^T; the sin factor removes it from Q either way.
Matrix q_matrix(const Vector& x, const Vector& y);

}  // namespace gencs
