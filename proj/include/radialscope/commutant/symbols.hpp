#pragma once

// Commutant symbols near a radial point q of the Lagrangian radial set, built in the
// conic chart (y, z, theta, zeta) from the normal coordinates eta0, alpha, beta:
//   eta1 = |beta - beta(q)|^2 + C |alpha|^2,  eta2 = |alpha|^2,
//   chi0 = chi(eta0^2), chi1 = chi(eta1), chi2 = chi(eta2),
//   b_t = rhohat chi0 chi1 chi2 rho_t        (below s0; chi2 omitted above s1),
// and the identity (1/2) H_p b^2 + a b^2 = sigma (g1^2 + g2^2) + e, with sigma = sgn(lambda)
// below s0 and -sgn(lambda) above s1.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "radialscope/commutant/cutoffs.hpp"
#include "radialscope/geometry.hpp"

namespace radialscope {

/// Product grid around q: y = y_q + offsets, theta = offsets, z = root(y, theta) + offset.
struct NeighborhoodBox {
  std::vector<double> y_center;
  double y_half = 0.5;
  double z_half = 0.5;
  double theta_half = 0.5;
  std::size_t per_axis = 9;
};

enum class GridRestriction { none, characteristic, radial_set };

namespace detail {

inline std::vector<double> axis(double half, std::size_t count) {
  if (count < 2) return {0.0};
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = -half + 2.0 * half * static_cast<double>(i) / (count - 1);
  return v;
}

/// Points in conic coordinate order at each zeta. `boundary_only` keeps points with some
/// free axis at an end of its range.
inline std::vector<std::vector<double>> box_points(const RadialChart& chart, const NeighborhoodBox& box,
                                                   std::span<const double> zetas,
                                                   GridRestriction restriction = GridRestriction::none,
                                                   bool boundary_only = false) {
  const std::size_t k = chart.conic.y().size();
  const auto coords = chart.conic.coordinates();
  const CompiledExpr root(chart.root, coords);
  const std::size_t n = box.per_axis;

  std::vector<std::vector<double>> axes;
  std::vector<bool> free;
  for (std::size_t i = 0; i < k; ++i) {
    auto a = axis(box.y_half, n);
    for (auto& v : a) v += box.y_center.at(i);
    axes.push_back(a);
    free.push_back(true);
  }
  const bool on_sigma = restriction != GridRestriction::none;
  axes.push_back(on_sigma ? std::vector<double>{0.0} : axis(box.z_half, n));
  free.push_back(!on_sigma);
  for (std::size_t i = 0; i < k; ++i) {
    const bool on_lambda = restriction == GridRestriction::radial_set;
    axes.push_back(on_lambda ? std::vector<double>{0.0} : axis(box.theta_half, n));
    free.push_back(!on_lambda);
  }

  std::vector<std::vector<double>> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<double> point(coords.size(), 0.0);
  std::vector<double> scratch;
  double z0 = 0.0;
  while (true) {
    bool edge = false;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      if (free[a] && (idx[a] == 0 || idx[a] + 1 == axes[a].size())) edge = true;
    }
    if (!boundary_only || edge) {
      for (std::size_t i = 0; i < k; ++i) {
        point[i] = axes[i][idx[i]];
        point[k + 1 + i] = axes[k + 1 + i][idx[k + 1 + i]];
      }
      point[k] = 0.0;
      point[2 * k + 1] = 1.0;
      root.evaluate(point, std::span<double>(&z0, 1), scratch);
      point[k] = z0 + axes[k][idx[k]];
      for (double zeta : zetas) {
        point[2 * k + 1] = zeta;
        out.push_back(point);
      }
    }
    std::size_t a = 0;
    while (a < axes.size() && ++idx[a] == axes[a].size()) idx[a++] = 0;
    if (a == axes.size()) break;
  }
  return out;
}

}  // namespace detail

struct CutoffSearch {
  double c_max = 4.0;  // |C| candidates c_max, c_max/2, ... >= c_min
  double c_min = 1.0 / 64.0;
  double t_max = 0.25;  // T candidates t_max, t_max/2, ... >= t_min
  double t_min = 1.0 / 16384.0;
  double zeta0 = 1.0;
  double neighborhood = 0.5;  // half-width of U0' in (y - y_q, z - root, theta)
  std::size_t per_axis = 9;
  double margin = 1e-10;  // relative tolerance for the nonstrict sign tests
};

struct CutoffSpec {
  RegularizerCase kind = RegularizerCase::below_s0;
  double C = 0.0;
  double eps = 0.0;
  double T = 0.0;
  double zeta0 = 1.0;
  double lambda_sign = 1.0;
  double margin = 1e-10;
  CutoffProfile profile_eta0, profile_eta1, profile_eta2;
  NeighborhoodBox box;
  SymExpr eta0, eta1, eta2;

  SymExpr chi0() const { return profile_eta0(eta0 * eta0); }
  SymExpr chi1() const { return profile_eta1(eta1); }
  SymExpr chi2() const {
    return kind == RegularizerCase::below_s0 ? profile_eta2(eta2) : SymExpr(1.0);
  }
  /// Sign of the commutator identity: sgn(lambda) below s0, -sgn(lambda) above s1.
  double identity_sign() const { return kind == RegularizerCase::below_s0 ? lambda_sign : -lambda_sign; }
};

namespace detail {

struct SignWitness {
  std::vector<double> point;
  double value;
};

/// First point where sign * value < -margin * scale; scale is the largest |value| seen (or 1).
inline std::optional<SignWitness> sign_defect(const CompiledExpr& q, const std::vector<std::vector<double>>& points,
                                              double sign, double margin) {
  std::vector<double> values(points.size());
  std::vector<double> scratch;
  double scale = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    q.evaluate(points[i], std::span<double>(&values[i], 1), scratch);
    if (!std::isfinite(values[i])) return SignWitness{points[i], values[i]};
    scale = std::max(scale, std::fabs(values[i]));
  }
  if (scale == 0.0) scale = 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (sign * values[i] < -margin * scale) return SignWitness{points[i], values[i]};
  }
  return std::nullopt;
}

inline SymExpr squared_norm(const std::vector<SymExpr>& v, std::span<const double> center) {
  SymExpr s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const SymExpr d = center.empty() ? v[i] : v[i] - center[i];
    s += d * d;
  }
  return s;
}

inline std::vector<double> beta_at(const RadialChart& chart, std::span<const double> w) {
  std::vector<double> out;
  for (const auto& b : chart.beta) out.push_back(evaluate(b, chart.conic.coordinates(), w));
  return out;
}

}  // namespace detail

struct CommutantOptions {
  std::vector<double> t_ladder = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> zeta_factors = {1.0, 2.0, 8.0, 64.0, 1024.0};  // multiples of zeta0 + 1
};

/// Regularizer data the cutoff search must respect: the g2 radicand keeps its sign on the support.
struct RadicandConstraint {
  RegularizerSpec regularizer;
  SymExpr subprincipal;  // canonical coordinates
  CommutantOptions options;
};

namespace detail {

/// sign (rho H_p rho + a rho^2) with t left free.
inline SymExpr g2_radicand(const RadialChart& chart, const RegularizerSpec& reg, const SymExpr& a_conic, double sign) {
  const SymExpr rho = rho_family(reg, SymExpr::variable(chart.conic.zeta()), SymExpr::variable("t"));
  return sign * (rho * chart.field().apply(rho) + a_conic * rho * rho);
}

inline std::vector<double> radicand_zetas(double zeta0, std::span<const double> factors) {
  std::vector<double> z = {zeta0 + 0.5};
  for (double f : factors) z.push_back((zeta0 + 1.0) * f);
  return z;
}

/// Points of the box, each repeated for every t and extended by t.
inline std::vector<std::vector<double>> with_t(const std::vector<std::vector<double>>& base,
                                               std::span<const double> ts) {
  std::vector<std::vector<double>> out;
  out.reserve(base.size() * ts.size());
  for (const auto& w : base) {
    for (double t : ts) {
      auto p = w;
      p.push_back(t);
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace detail

/// Finds C (sign fixed by the case) and T so that H_p eta1 carries the required sign on the
/// support of the cutoffs, and that support stays inside the neighborhood box. With a
/// radicand constraint the support is also shrunk until the g2 radicand keeps its sign;
/// if that never happens the last witness is reported as a SignViolation.
inline CutoffSpec make_cutoffs(const RadialChart& chart, std::span<const double> q, RegularizerCase kind,
                               const CutoffSearch& search = {},
                               const std::optional<RadicandConstraint>& constraint = std::nullopt) {
  if (!(search.c_min > 0.0 && search.c_min <= search.c_max && search.t_min > 0.0 && search.t_min <= search.t_max)) {
    throw InvalidParameters("cutoff search ranges must be positive and ordered");
  }
  const auto coords = chart.conic.coordinates();
  const auto rep = chart.representative(q);
  const double lambda_q = evaluate(chart.lambda, coords, rep);
  if (!(std::fabs(lambda_q) > 1e-12)) throw DegeneracyError("lambda vanishes at q");

  CutoffSpec spec;
  spec.kind = kind;
  spec.zeta0 = search.zeta0;
  spec.lambda_sign = lambda_q > 0.0 ? 1.0 : -1.0;
  spec.margin = search.margin;
  spec.eta0 = chart.eta0;
  spec.eta2 = detail::squared_norm(chart.alpha, {});
  const auto beta_q = detail::beta_at(chart, rep);
  const SymExpr beta_part = detail::squared_norm(chart.beta, beta_q);

  const VectorFieldSym field = chart.field();
  const bool below = kind == RegularizerCase::below_s0;
  // Below s0 H_p eta1 must oppose lambda; above s1 it must agree with it.
  const double required = below ? -spec.lambda_sign : spec.lambda_sign;
  const double c_sign = below ? -1.0 : 1.0;
  const double zeta_probe[] = {search.zeta0 + 1.0};
  const double dz = std::fabs(lambda_q);

  std::optional<CompiledExpr> radicand;
  std::vector<double> radicand_zeta;
  std::optional<detail::SignWitness> radicand_failure;
  if (constraint) {
    if (constraint->regularizer.kind != kind) throw InvalidParameters("regularizer case does not match cutoff case");
    std::vector<std::string> names = coords;
    names.push_back("t");
    const double sign = below ? spec.lambda_sign : -spec.lambda_sign;
    radicand.emplace(detail::g2_radicand(chart, constraint->regularizer,
                                         chart.conic.to_conic(constraint->subprincipal), sign),
                     names);
    radicand_zeta = detail::radicand_zetas(search.zeta0, constraint->options.zeta_factors);
  }

  for (double c = search.c_max; c >= search.c_min * (1.0 - 1e-12); c *= 0.5) {
    const SymExpr eta1 = beta_part + (c_sign * c) * spec.eta2;
    const CompiledExpr flow(field.apply(eta1), coords);
    const CompiledExpr levels(std::vector<SymExpr>{spec.eta0 * spec.eta0, eta1, spec.eta2}, coords);
    for (double T = search.t_max; T >= search.t_min * (1.0 - 1e-12); T *= 0.5) {
      NeighborhoodBox box;
      box.y_center.assign(q.begin(), q.end());
      box.per_axis = search.per_axis;
      box.y_half = std::min(search.neighborhood, 1.5 * std::sqrt(T * (below ? 1.0 + c : 1.0)));
      box.theta_half = std::min(search.neighborhood, 1.5 * std::sqrt(below ? T : T / c));
      box.z_half = std::min(search.neighborhood, 1.5 * std::sqrt(T) / dz);

      auto inside = [&](std::span<const double> w) {
        const auto l = levels.evaluate_all(w);
        return l[0] < T && l[1] < T && (!below || l[2] < T);
      };
      bool contained = true;
      for (const auto& w : detail::box_points(chart, box, zeta_probe, GridRestriction::none, true)) {
        if (inside(w)) {
          contained = false;
          break;
        }
      }
      if (!contained) continue;

      std::vector<std::vector<double>> support;
      for (auto& w : detail::box_points(chart, box, zeta_probe)) {
        if (inside(w)) support.push_back(std::move(w));
      }
      if (support.empty()) continue;
      if (detail::sign_defect(flow, support, required, search.margin)) continue;
      if (radicand) {
        std::vector<std::vector<double>> on_support;
        for (auto& w : detail::box_points(chart, box, radicand_zeta)) {
          if (inside(w)) on_support.push_back(std::move(w));
        }
        const auto points = detail::with_t(on_support, constraint->options.t_ladder);
        if (auto bad = detail::sign_defect(*radicand, points, 1.0, search.margin)) {
          radicand_failure = bad;
          continue;
        }
      }

      spec.C = c_sign * c;
      spec.T = T;
      spec.eps = 0.5 * T;
      spec.profile_eta0 = spec.profile_eta1 = spec.profile_eta2 = CutoffProfile(spec.eps, spec.T);
      spec.box = box;
      spec.eta1 = eta1;
      return spec;
    }
  }
  if (radicand_failure) {
    throw SignViolation("g2 radicand is negative arbitrarily close to q (s is past the threshold for this case)",
                        radicand_failure->point, radicand_failure->value);
  }
  throw SearchExhausted("no (C, T) in the configured ranges gives H_p eta1 the required sign on the cutoff support");
}

struct CommutantSymbols {
  RadialChart chart;
  RegularizerSpec regularizer;
  CutoffSpec cutoffs;
  double sign = 1.0;
  std::vector<std::string> variables;  // conic coordinates followed by "t"
  SymExpr a;                           // subprincipal difference in conic coordinates
  SymExpr rho, rho_hat, chi0, chi1, chi2;
  SymExpr b, g1, g2, e, h;
  SymExpr radicand;  // under the square root in g2
  CommutantOptions options;
};

namespace detail {

inline std::vector<double> scaled_zetas(const CutoffSpec& c, std::span<const double> factors) {
  std::vector<double> z;
  for (double f : factors) z.push_back((c.zeta0 + 1.0) * f);
  return z;
}

/// Zero except for a / b where b != 0.
inline const SpecialFunctionPtr& guarded_quotient() {
  static const SpecialFunctionPtr f = std::make_shared<LambdaFunction>(
      "divz", 2, [](std::span<const double> x) { return x[1] != 0.0 ? x[0] / x[1] : 0.0; },
      [](std::size_t i, std::span<const SymExpr> x) -> SymExpr {
        if (i == 0) return SymExpr::apply(guarded_quotient(), {SymExpr(1.0), x[1]});
        return -SymExpr::apply(guarded_quotient(), {x[0], x[1] * x[1]});
      });
  return f;
}

}  // namespace detail

inline CommutantSymbols build_symbols(const RadialChart& chart, const RegularizerSpec& reg, const CutoffSpec& cut,
                                      const SymExpr& subprincipal, const CommutantOptions& opt = {}) {
  reg.validate();
  CommutantSymbols sym;
  sym.chart = chart;
  sym.regularizer = reg;
  sym.cutoffs = cut;
  sym.options = opt;
  sym.sign = cut.identity_sign();
  sym.variables = chart.conic.coordinates();
  sym.variables.push_back("t");

  const SymExpr zeta = SymExpr::variable(chart.conic.zeta());
  const SymExpr t = SymExpr::variable("t");
  sym.a = chart.conic.to_conic(subprincipal);
  sym.rho = rho_family(reg, zeta, t);
  sym.rho_hat = zeta_switch(zeta, cut.zeta0);
  sym.chi0 = cut.chi0();
  sym.chi1 = cut.chi1();
  sym.chi2 = cut.chi2();

  const VectorFieldSym field = chart.field();
  const SymExpr& rho = sym.rho;
  const SymExpr rho2 = rho * rho;
  sym.radicand = detail::g2_radicand(chart, reg, sym.a, sym.sign);
  const SymExpr flow1 = field.apply(cut.eta1);
  const SymExpr cut_product = sym.chi0 * sym.chi1 * sym.chi2;

  sym.b = sym.rho_hat * cut_product * rho;
  sym.g1 = sym.rho_hat * sym.chi0 * sym.chi2 * rho * cut.profile_eta1.root_product(cut.eta1) *
           sqrtp(-sym.sign * flow1);
  sym.g2 = sym.rho_hat * cut_product * sqrtp(sym.radicand);

  const SymExpr d_chi0 = field.apply(sym.chi0);
  const SymExpr chi1_sq = sym.chi1 * sym.chi1;
  const SymExpr hat_sq = sym.rho_hat * sym.rho_hat;
  if (reg.kind == RegularizerCase::below_s0) {
    const SymExpr chi0_sq = sym.chi0 * sym.chi0;
    const SymExpr chi2_sq = sym.chi2 * sym.chi2;
    sym.e = hat_sq * chi1_sq * chi2_sq * rho2 * sym.chi0 * d_chi0 +
            hat_sq * chi0_sq * chi1_sq * rho2 * sym.chi2 * field.apply(sym.chi2) +
            chi0_sq * chi1_sq * chi2_sq * rho2 * sym.rho_hat * field.apply(sym.rho_hat);
  } else {
    // The rhohat H_p rhohat term lives in zeta0 < zeta < zeta0 + 1 and is left out.
    sym.e = hat_sq * chi1_sq * rho2 * sym.chi0 * d_chi0;
  }
  sym.h = SymExpr::apply(detail::guarded_quotient(), {sym.b * sym.b, sym.g2});

  // Both square roots must have nonnegative radicands on the support.
  const auto zs = detail::radicand_zetas(cut.zeta0, opt.zeta_factors);
  const CompiledExpr support(cut_product, chart.conic.coordinates());
  std::vector<std::vector<double>> on_support;
  for (auto& w : detail::box_points(chart, cut.box, zs)) {
    if (support(w) > 0.0) on_support.push_back(std::move(w));
  }
  const auto points = detail::with_t(on_support, opt.t_ladder);
  if (auto bad = detail::sign_defect(CompiledExpr(sym.radicand, sym.variables), points, 1.0, cut.margin)) {
    throw SignViolation("g2 radicand is negative on the support (s is past the threshold for this case)",
                        bad->point, bad->value);
  }
  const CompiledExpr g1_radicand(-sym.sign * flow1 * cut.profile_eta1.derivative(cut.eta1), chart.conic.coordinates());
  if (auto bad = detail::sign_defect(g1_radicand, on_support, -1.0, cut.margin)) {
    throw SignViolation("g1 radicand is negative on the support (cutoff sign condition fails)", bad->point,
                        bad->value);
  }
  return sym;
}

struct IdentityReport {
  std::vector<double> t;
  std::vector<double> residual;  // max relative residual per t on zeta >= zeta0 + 1
  double max_residual = 0.0;
  double transition_residual = 0.0;  // zeta0 < zeta < zeta0 + 1
  std::size_t points_per_t = 0;
  std::vector<double> witness;
  bool passed = false;
};

/// Relative residual |L - R| / max(1, |L|, |R|) of
///   (1/2) H_p b^2 + a b^2 = sign (g1^2 + g2^2) + e
/// with H_p and a built from the given (canonical) p and subprincipal difference.
inline IdentityReport verify_commutator_identity(const CommutantSymbols& sym, const SymExpr& p,
                                                 const SymExpr& subprincipal, double tol = 1e-8) {
  const ConicChart& conic = sym.chart.conic;
  const VectorFieldSym field = conic_hamilton_field(conic.to_conic(p), conic);
  const SymExpr a = conic.to_conic(subprincipal);
  const SymExpr b2 = sym.b * sym.b;
  const SymExpr lhs = 0.5 * field.apply(b2) + a * b2;
  const SymExpr rhs = sym.sign * (sym.g1 * sym.g1 + sym.g2 * sym.g2) + sym.e;
  const CompiledExpr both(std::vector<SymExpr>{lhs, rhs}, sym.variables);

  auto residual_at = [&](std::span<const double> point) {
    const auto v = both.evaluate_all(point);
    return std::fabs(v[0] - v[1]) / std::max({1.0, std::fabs(v[0]), std::fabs(v[1])});
  };

  IdentityReport rep;
  const auto zetas = detail::scaled_zetas(sym.cutoffs, sym.options.zeta_factors);
  const auto base = detail::box_points(sym.chart, sym.cutoffs.box, zetas);
  rep.points_per_t = base.size();
  for (double t : sym.options.t_ladder) {
    double worst = 0.0;
    for (const auto& w : base) {
      auto point = w;
      point.push_back(t);
      const double r = residual_at(point);
      if (!(r <= worst)) {
        worst = r;
        if (!(r <= rep.max_residual)) {
          rep.max_residual = r;
          rep.witness = point;
        }
      }
    }
    rep.t.push_back(t);
    rep.residual.push_back(worst);
  }
  const double transition[] = {sym.cutoffs.zeta0 + 0.25, sym.cutoffs.zeta0 + 0.5, sym.cutoffs.zeta0 + 0.75};
  for (const auto& point : detail::with_t(detail::box_points(sym.chart, sym.cutoffs.box, transition),
                                          sym.options.t_ladder)) {
    rep.transition_residual = std::max(rep.transition_residual, residual_at(point));
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

struct SupportCondition {
  std::string name;
  bool passed = false;
  double max_value = 0.0;
  std::vector<double> witness;
};

struct SupportReport {
  std::vector<SupportCondition> conditions;
  bool passed = false;
};

/// Each condition holds when |expression| < threshold on the grid of the forbidden set.
inline SupportReport verify_support_conditions(const CommutantSymbols& sym, double threshold = 1e-12) {
  const RadialChart& chart = sym.chart;
  const CutoffSpec& cut = sym.cutoffs;
  const VectorFieldSym field = chart.field();
  const auto coords = chart.conic.coordinates();
  const double probe[] = {cut.zeta0 + 1.0};
  const auto zetas = detail::scaled_zetas(cut, sym.options.zeta_factors);
  const bool below = sym.regularizer.kind == RegularizerCase::below_s0;

  auto check = [&](std::string name, const SymExpr& e, const std::vector<std::vector<double>>& points,
                   const std::vector<std::string>& names) {
    SupportCondition c;
    c.name = std::move(name);
    const CompiledExpr f(e, names);
    for (const auto& w : points) {
      const double v = std::fabs(f(w));
      if (!(v <= c.max_value)) {
        c.max_value = v;
        c.witness = w;
      }
    }
    c.passed = c.max_value < threshold;
    return c;
  };

  const auto sigma = detail::box_points(chart, cut.box, probe, GridRestriction::characteristic);
  const auto lambda_set = detail::box_points(chart, cut.box, probe, GridRestriction::radial_set);
  const auto edge = detail::box_points(chart, cut.box, probe, GridRestriction::none, true);

  SupportReport rep;
  if (below) {
    rep.conditions.push_back(check("supp(chi1 chi2 Hp chi0) misses Sigma",
                                   sym.chi1 * sym.chi2 * field.apply(sym.chi0), sigma, coords));
    rep.conditions.push_back(check("supp(chi0 chi1 Hp chi2) misses Lambda",
                                   sym.chi0 * sym.chi1 * field.apply(sym.chi2), lambda_set, coords));
  } else {
    rep.conditions.push_back(check("supp(chi1 Hp chi0) misses Sigma", sym.chi1 * field.apply(sym.chi0), sigma, coords));
  }
  rep.conditions.push_back(
      check("supp(cutoffs) compact in the neighborhood", sym.chi0 * sym.chi1 * sym.chi2, edge, coords));
  const auto forbidden = detail::with_t(
      detail::box_points(chart, cut.box, zetas, below ? GridRestriction::radial_set : GridRestriction::characteristic),
      sym.options.t_ladder);
  rep.conditions.push_back(
      check(below ? "e_t vanishes on Lambda" : "e_t vanishes on Sigma", sym.e, forbidden, sym.variables));

  // q must be elliptic for g_{2,0}.
  SupportCondition elliptic;
  elliptic.name = "g_{2,0} nonzero at q";
  auto at_q = chart.representative(cut.box.y_center);
  at_q.back() = cut.zeta0 + 1.0;
  at_q.push_back(0.0);
  elliptic.max_value = evaluate(sym.g2, sym.variables, at_q);
  elliptic.witness = at_q;
  elliptic.passed = std::fabs(elliptic.max_value) > threshold;
  rep.conditions.push_back(elliptic);

  rep.passed = std::all_of(rep.conditions.begin(), rep.conditions.end(), [](const auto& c) { return c.passed; });
  return rep;
}

}  // namespace radialscope
