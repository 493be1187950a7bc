#pragma once

// Closed-form shell energies for homogeneous model singularities. Written independently of
// the library: its own logistic step and a log-scale trapezoid rule.

#include <cmath>

namespace oracle {

inline double logistic_step(double r, double lo, double hi) {
  if (r <= lo) return 1.0;
  if (r >= hi) return 0.0;
  const double g = 1.0 / (hi - r) - 1.0 / (r - lo);
  return 1.0 / (1.0 + std::exp(g));
}

/// Smooth dyadic weight for shell j, edges at 2^j and 2^{j+1}.
inline double shell(double xi, int j) {
  const double a = std::sqrt(0.5), b = std::sqrt(2.0);
  return logistic_step(xi / std::pow(2.0, j + 1), a, b) - logistic_step(xi / std::pow(2.0, j), a, b);
}

/// Integral over xi > 0 of shell(xi, j) * xi^power.
inline double shell_moment(int j, double power, int nodes = 20000) {
  const double lo = std::log(std::pow(2.0, j - 0.5)), hi = std::log(std::pow(2.0, j + 1.5));
  const double du = (hi - lo) / nodes;
  double sum = 0.0;
  for (int k = 1; k < nodes; ++k) {
    const double xi = std::exp(lo + k * du);
    sum += shell(xi, j) * std::pow(xi, power + 1.0);
  }
  return sum * du;
}

/// Shell energy of x_+^a for real a > -1: |u_hat(xi)| = Gamma(a+1) |xi|^{-1-a}, both signs of xi.
inline double xplus_energy(double a, int j) {
  const double g = std::tgamma(a + 1.0);
  return 2.0 * g * g * shell_moment(j, -2.0 - 2.0 * a);
}

/// Shell energy of the unit point mass, |u_hat| = 1.
inline double delta_energy(int j) { return 2.0 * shell_moment(j, 0.0); }

}  // namespace oracle
