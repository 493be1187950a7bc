#pragma once

// Smooth one-dimensional profiles and the order-carrying weights rho_t.
//
// The cutoff profile on [eps, T] is logistic in g(t) = 1/(T - t) - 1/(t - eps):
//   chi(t) = 1 / (1 + e^g),   chi' = -chi (1 - chi) g',   g' = 1/(T-t)^2 + 1/(t-eps)^2,
// so sqrt(-chi chi') = chi sqrt(1 - chi) sqrt(g') is smooth, and chi ~ exp(-1/(T-t)) near T.

#include <cmath>
#include <memory>
#include <sstream>
#include <string>

#include "radialscope/symcore.hpp"

namespace radialscope {

class CutoffProfile {
 public:
  CutoffProfile() : CutoffProfile(0.5, 1.0) {}
  CutoffProfile(double eps, double T) : eps_(eps), T_(T) {
    if (!(eps < T) || !std::isfinite(eps) || !std::isfinite(T)) {
      throw InvalidParameters("cutoff profile needs eps < T");
    }
    std::ostringstream tag;
    tag << "[" << eps << "," << T << "]";
    const std::string suffix = tag.str();
    const double e = eps, t = T;
    d2_ = std::make_shared<LambdaFunction>(
        "cutoff_d2" + suffix, 1, [e, t](std::span<const double> a) { return second(a[0], e, t); },
        [](std::size_t, std::span<const SymExpr>) -> SymExpr {
          throw DerivativeUnavailable("third derivative of a cutoff profile is not provided");
        });
    auto d2 = d2_;
    d1_ = std::make_shared<LambdaFunction>(
        "cutoff_d1" + suffix, 1, [e, t](std::span<const double> a) { return first(a[0], e, t); },
        [d2](std::size_t, std::span<const SymExpr> a) { return SymExpr::apply(d2, {a[0]}); });
    auto d1 = d1_;
    value_ = std::make_shared<LambdaFunction>(
        "cutoff" + suffix, 1, [e, t](std::span<const double> a) { return value(a[0], e, t); },
        [d1](std::size_t, std::span<const SymExpr> a) { return SymExpr::apply(d1, {a[0]}); });
    root_ = std::make_shared<LambdaFunction>(
        "cutoff_root" + suffix, 1, [e, t](std::span<const double> a) { return root(a[0], e, t); },
        [](std::size_t, std::span<const SymExpr>) -> SymExpr {
          throw DerivativeUnavailable("derivative of sqrt(-chi chi') is not provided");
        });
  }

  double eps() const { return eps_; }
  double T() const { return T_; }

  SymExpr operator()(const SymExpr& arg) const { return SymExpr::apply(value_, {arg}); }
  SymExpr derivative(const SymExpr& arg) const { return SymExpr::apply(d1_, {arg}); }
  /// sqrt(-chi chi') applied to arg.
  SymExpr root_product(const SymExpr& arg) const { return SymExpr::apply(root_, {arg}); }

  double operator()(double x) const { return value(x, eps_, T_); }
  double derivative(double x) const { return first(x, eps_, T_); }
  double second_derivative(double x) const { return second(x, eps_, T_); }
  double root_product(double x) const { return root(x, eps_, T_); }

  /// Profile value without building the symbolic functions.
  static double value(double x, double eps, double T) {
    if (x <= eps) return 1.0;
    if (x >= T) return 0.0;
    return parts(x, eps, T).chi;
  }

 private:
  struct Parts {
    double chi, rest, g1, g2;  // chi, 1 - chi, g', g''
  };

  static bool interior(double x, double eps, double T) { return x > eps && x < T; }

  static Parts parts(double x, double eps, double T) {
    const double u = T - x, v = x - eps;
    const double g = 1.0 / u - 1.0 / v;
    return {1.0 / (1.0 + std::exp(g)), 1.0 / (1.0 + std::exp(-g)), 1.0 / (u * u) + 1.0 / (v * v),
            2.0 / (u * u * u) - 2.0 / (v * v * v)};
  }

  static double first(double x, double eps, double T) {
    if (!interior(x, eps, T)) return 0.0;
    const Parts p = parts(x, eps, T);
    if (p.chi == 0.0 || p.rest == 0.0) return 0.0;
    return -p.chi * p.rest * p.g1;
  }

  static double second(double x, double eps, double T) {
    if (!interior(x, eps, T)) return 0.0;
    const Parts p = parts(x, eps, T);
    if (p.chi == 0.0 || p.rest == 0.0) return 0.0;
    const double d1 = -p.chi * p.rest * p.g1;
    return -d1 * (p.rest - p.chi) * p.g1 - p.chi * p.rest * p.g2;
  }

  static double root(double x, double eps, double T) {
    if (!interior(x, eps, T)) return 0.0;
    const Parts p = parts(x, eps, T);
    if (p.chi == 0.0 || p.rest == 0.0) return 0.0;
    return p.chi * std::sqrt(p.rest) * std::sqrt(p.g1);
  }

  double eps_;
  double T_;
  SpecialFunctionPtr value_, d1_, d2_, root_;
};

/// 0 for zeta <= zeta0, 1 for zeta >= zeta0 + 1.
inline SymExpr zeta_switch(const SymExpr& zeta, double zeta0) {
  return 1.0 - CutoffProfile(zeta0, zeta0 + 1.0)(zeta);
}

enum class RegularizerCase { below_s0, above_s1 };

inline std::string to_string(RegularizerCase c) { return c == RegularizerCase::below_s0 ? "below_s0" : "above_s1"; }

struct RegularizerSpec {
  RegularizerCase kind = RegularizerCase::below_s0;
  double s = 0.0;
  double m = 1.0;
  double s1 = 0.0;  // above_s1 only
  double t = 0.0;

  /// (2s - m + 1)/2
  double exponent() const { return (2.0 * s - m + 1.0) / 2.0; }

  void validate() const {
    if (!std::isfinite(s) || !std::isfinite(m)) throw InvalidParameters("regularizer needs finite s and m");
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidParameters("regularizer parameter t must lie in [0, 1]");
    if (kind == RegularizerCase::above_s1 && !(s > s1)) {
      throw InvalidParameters("above-s1 regularizer needs s > s1");
    }
  }
};

/// rho_t as an expression in zeta, with t given by an expression (numeric or a free variable).
inline SymExpr rho_family(const RegularizerSpec& spec, const SymExpr& zeta, const SymExpr& t) {
  spec.validate();
  const SymExpr power = pow(zeta, spec.exponent());
  if (spec.kind == RegularizerCase::below_s0) {
    // Compactly supported weight: 1 on [0, 1], 0 beyond 2.
    return power * CutoffProfile(1.0, 2.0)(t * zeta);
  }
  return power * pow(1.0 + t * zeta, spec.s1 - spec.s);
}

inline SymExpr make_rho(const RegularizerSpec& spec, const std::string& zeta = "zeta") {
  return rho_family(spec, SymExpr::variable(zeta), spec.t);
}

}  // namespace radialscope
