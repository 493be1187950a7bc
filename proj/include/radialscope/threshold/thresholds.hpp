#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "radialscope/geometry.hpp"
#include "radialscope/threshold/operator.hpp"

namespace radialscope {

/// Ladders for the sup-inf forms: neighborhoods of radius 2^-k r0 around q and fiber
/// cut-offs zeta0 = 2^j, with zeta sampled at zeta0 * 2^l.
struct SweepConfig {
  double r0 = 0.5;
  int radius_min_exp = 1;
  int radius_max_exp = 6;
  int zeta0_min_exp = 3;
  int zeta0_max_exp = 10;
  int zeta_ladder = 10;
  int grid_per_axis = 5;
  bool force = false;  // run the sweep even when the pointwise formula applies
};

struct SweepEntry {
  double radius = 0.0;
  double zeta0 = 0.0;
  double inf_f = 0.0;
  double sup_f = 0.0;
};

struct ThresholdReport {
  SymExpr subprincipal;  // canonical coordinates
  SymExpr f;             // conic coordinates
  std::vector<double> q;
  bool homogeneous = false;
  double f_at_q = 0.0;
  double s0 = 0.0;
  double s1_lower_bound = 0.0;
  std::vector<SweepEntry> sweep;
  double s0_sweep = 0.0;  // extrapolated sweep values, set when a sweep ran
  double s1_sweep = 0.0;
};

namespace detail {

inline bool zero_on_samples(const SymExpr& e, const ChartSpec& chart) {
  return e.is_constant(0.0) || equal_on_samples(e, 0.0, default_box(chart), 32, 4, 1e-14).equal;
}

}  // namespace detail

/// f = sigma_{m-1}((P - P*)/2i) zeta / lambda as an expression in conic coordinates.
inline SymExpr threshold_f(const OperatorSpec& op, const RadialChart& chart) {
  const SymExpr sub = chart.conic.to_conic(subprincipal_difference(op));
  return sub * chart.zeta / chart.lambda;
}

namespace detail {

inline void check_elliptic(const RadialChart& chart, std::span<const double> q) {
  const double l = evaluate(chart.lambda / pow(chart.zeta, SymExpr(chart.order)), chart.conic.coordinates(),
                            chart.representative(q));
  if (!std::isfinite(l) || std::fabs(l) < 1e-12) throw DegeneracyError("lambda is not elliptic at q");
}

inline void run_sweep(ThresholdReport& rep, const RadialChart& chart, const SweepConfig& cfg) {
  if (cfg.radius_max_exp < cfg.radius_min_exp + 1 || cfg.zeta0_max_exp < cfg.zeta0_min_exp + 1 ||
      cfg.grid_per_axis < 1) {
    throw InvalidParameters("sweep ladders need at least two rungs each");
  }
  const ConicChart& cc = chart.conic;
  const CompiledExpr prog(rep.f, cc.coordinates());
  const std::size_t dims = cc.base_coordinates().size();
  const std::vector<double> center = chart.representative(rep.q);
  std::vector<double> scratch;
  double out[1];

  const int zmin = cfg.zeta0_min_exp;
  const int zmax = cfg.zeta0_max_exp + cfg.zeta_ladder;
  for (int rk = cfg.radius_min_exp; rk <= cfg.radius_max_exp; ++rk) {
    const double radius = cfg.r0 * std::ldexp(1.0, -rk);
    // lo/hi over space for each zeta rung.
    std::vector<double> lo(static_cast<std::size_t>(zmax - zmin + 1), INFINITY);
    std::vector<double> hi(lo.size(), -INFINITY);
    std::size_t total = 1;
    for (std::size_t d = 0; d < dims; ++d) total *= static_cast<std::size_t>(cfg.grid_per_axis);
    std::vector<double> point = center;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      for (std::size_t d = 0; d < dims; ++d) {
        const int k = static_cast<int>(rest % static_cast<std::size_t>(cfg.grid_per_axis));
        rest /= static_cast<std::size_t>(cfg.grid_per_axis);
        const double u = cfg.grid_per_axis == 1 ? 0.0 : -1.0 + 2.0 * k / (cfg.grid_per_axis - 1);
        point[d] = center[d] + radius * u;
      }
      for (int j = zmin; j <= zmax; ++j) {
        point.back() = std::ldexp(1.0, j);
        prog.evaluate(point, out, scratch);
        if (!std::isfinite(out[0])) throw EvaluationError("threshold quotient is not finite", point);
        lo[static_cast<std::size_t>(j - zmin)] = std::min(lo[static_cast<std::size_t>(j - zmin)], out[0]);
        hi[static_cast<std::size_t>(j - zmin)] = std::max(hi[static_cast<std::size_t>(j - zmin)], out[0]);
      }
    }
    for (int j0 = cfg.zeta0_min_exp; j0 <= cfg.zeta0_max_exp; ++j0) {
      SweepEntry e{radius, std::ldexp(1.0, j0), INFINITY, -INFINITY};
      for (int l = 0; l <= cfg.zeta_ladder; ++l) {
        const auto slot = static_cast<std::size_t>(j0 + l - zmin);
        e.inf_f = std::min(e.inf_f, lo[slot]);
        e.sup_f = std::max(e.sup_f, hi[slot]);
      }
      rep.sweep.push_back(e);
    }
  }
  if (rep.sweep.empty()) throw InvalidParameters("empty sweep");

  // Richardson in 1/zeta0 at each radius, then in the radius.
  const int per_radius = cfg.zeta0_max_exp - cfg.zeta0_min_exp + 1;
  auto at = [&](int rk, int j0) -> const SweepEntry& {
    return rep.sweep[static_cast<std::size_t>((rk - cfg.radius_min_exp) * per_radius + (j0 - cfg.zeta0_min_exp))];
  };
  auto in_zeta = [&](int rk, bool inf) {
    const auto& a = at(rk, cfg.zeta0_max_exp);
    const auto& b = at(rk, cfg.zeta0_max_exp - 1);
    return inf ? 2.0 * a.inf_f - b.inf_f : 2.0 * a.sup_f - b.sup_f;
  };
  const double shift = (chart.order - 1.0) / 2.0;
  rep.s0_sweep = 2.0 * in_zeta(cfg.radius_max_exp, true) - in_zeta(cfg.radius_max_exp - 1, true) + shift;
  rep.s1_sweep = 2.0 * in_zeta(cfg.radius_max_exp, false) - in_zeta(cfg.radius_max_exp - 1, false) + shift;
}

}  // namespace detail

/// s0 and the s1 lower bound at the point q = (y_q) of the radial set.
inline ThresholdReport compute_thresholds(const OperatorSpec& op, const RadialChart& chart, std::span<const double> q,
                                          const SweepConfig& cfg = {}) {
  detail::check_elliptic(chart, q);
  ThresholdReport rep;
  rep.q.assign(q.begin(), q.end());
  rep.subprincipal = subprincipal_difference(op);
  rep.f = chart.conic.to_conic(rep.subprincipal) * chart.zeta / chart.lambda;
  const auto degree = homogeneity_degree(rep.subprincipal, op.chart);
  rep.homogeneous = detail::zero_on_samples(rep.subprincipal, op.chart) ||
                    (degree && std::fabs(*degree - (op.order - 1.0)) < 1e-9);
  rep.f_at_q = evaluate(rep.f, chart.conic.coordinates(), chart.representative(q));
  const double shift = (op.order - 1.0) / 2.0;
  if (!rep.homogeneous || cfg.force) detail::run_sweep(rep, chart, cfg);
  if (rep.homogeneous) {
    rep.s0 = rep.f_at_q + shift;
    rep.s1_lower_bound = rep.s0;
  } else {
    rep.s0 = rep.s0_sweep;
    rep.s1_lower_bound = rep.s1_sweep;
  }
  return rep;
}

inline double s0(const OperatorSpec& op, const RadialChart& chart, std::span<const double> q,
                 const SweepConfig& cfg = {}) {
  return compute_thresholds(op, chart, q, cfg).s0;
}

inline double s1_bound(const OperatorSpec& op, const RadialChart& chart, std::span<const double> q,
                       const SweepConfig& cfg = {}) {
  return compute_thresholds(op, chart, q, cfg).s1_lower_bound;
}

struct InvarianceCase {
  std::string kind;  // "zeta", "density" or "representative"
  std::string change;
  double s0 = 0.0;
  double delta = 0.0;
  double tolerance = 0.0;
  bool same_classification = true;
  bool passed = true;
};

struct InvarianceReport {
  double s0 = 0.0;
  RadialKind kind = RadialKind::source;
  std::vector<InvarianceCase> cases;
  bool passed = true;
};

struct InvarianceOptions {
  int zeta_changes = 10;
  int density_changes = 5;
  std::vector<double> perturbations = {0.3, -0.3};
  std::uint64_t seed = 42;
  double tol = 1e-9;
  double sweep_tol = 1e-6;
  SweepConfig sweep;
};

namespace detail {

// c0 + sum c_k sin(a_k . u + b_k) with c0 > sum |c_k|: smooth and positive.
inline SymExpr random_positive(const std::vector<std::string>& vars, std::mt19937_64& rng, int terms = 3) {
  std::uniform_real_distribution<double> amp(-0.5, 0.5), freq(-2.0, 2.0), phase(0.0, 6.283185307179586);
  SymExpr sum = 0.0;
  double bound = 0.0;
  for (int t = 0; t < terms; ++t) {
    SymExpr arg = phase(rng);
    for (const auto& v : vars) arg += freq(rng) * SymExpr::variable(v);
    const double c = amp(rng);
    bound += std::fabs(c);
    sum += c * sin(arg);
  }
  return (1.0 + bound) + sum;
}

inline SymExpr random_exponent(const std::vector<std::string>& vars, std::mt19937_64& rng, int terms = 3) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0), freq(-2.0, 2.0), phase(0.0, 6.283185307179586);
  SymExpr sum = 0.0;
  for (int t = 0; t < terms; ++t) {
    SymExpr arg = phase(rng);
    for (const auto& v : vars) arg += freq(rng) * SymExpr::variable(v);
    sum += amp(rng) * sin(arg);
  }
  return sum;
}

}  // namespace detail

/// Recomputes s0 under (a) zeta -> g zeta for random positive degree-0 g, (b) random changes
/// of density, (c) an order m-2 change of the subprincipal representative (sweep route).
inline InvarianceReport invariance_check(const OperatorSpec& op, const RadialChart& chart, std::span<const double> q,
                                         const InvarianceOptions& opt = {}) {
  InvarianceReport rep;
  const ThresholdReport base = compute_thresholds(op, chart, q, opt.sweep);
  rep.s0 = base.s0;
  rep.kind = sink_source_classify(chart, q).kind;
  const double shift = (op.order - 1.0) / 2.0;
  std::mt19937_64 rng(opt.seed);
  const SymExpr sub_conic = chart.conic.to_conic(base.subprincipal);

  for (int k = 0; k < opt.zeta_changes; ++k) {
    const SymExpr g = detail::random_positive(chart.conic.base_coordinates(), rng);
    const RadialChart scaled = rescale_zeta(chart, g);
    const SymExpr f = sub_conic * scaled.zeta / scaled.lambda;
    InvarianceCase c{"zeta", "zeta -> (" + g.to_string() + ") zeta"};
    c.s0 = evaluate(f, chart.conic.coordinates(), chart.representative(q)) + shift;
    if (!base.homogeneous) {
      // The pointwise value is only meaningful for homogeneous representatives.
      c.s0 = compute_thresholds(op, scaled, q, opt.sweep).s0;
    }
    c.delta = std::fabs(c.s0 - base.s0);
    c.tolerance = base.homogeneous ? opt.tol : opt.sweep_tol;
    c.same_classification = sink_source_classify(scaled, q).kind == rep.kind;
    c.passed = c.delta <= c.tolerance && c.same_classification;
    rep.cases.push_back(c);
  }

  for (int k = 0; k < opt.density_changes; ++k) {
    const SymExpr h = detail::random_exponent(op.chart.base, rng);
    OperatorSpec changed = op;
    changed.density = op.density * exp(h);
    InvarianceCase c{"density", "density -> density * exp(" + h.to_string() + ")"};
    c.s0 = compute_thresholds(changed, chart, q, opt.sweep).s0;
    c.delta = std::fabs(c.s0 - base.s0);
    c.tolerance = base.homogeneous ? opt.tol : opt.sweep_tol;
    c.same_classification = true;
    c.passed = c.delta <= c.tolerance;
    rep.cases.push_back(c);
  }

  SweepConfig forced = opt.sweep;
  forced.force = true;
  const double baseline_sweep = base.sweep.empty() ? compute_thresholds(op, chart, q, forced).s0_sweep : base.s0_sweep;
  const SymExpr xin = SymExpr::variable(op.chart.fiber.back());
  for (double eps : opt.perturbations) {
    OperatorSpec changed = op;
    if (changed.terms.size() < 2) changed.terms.resize(2);
    const SymExpr lower = eps * pow(double(chart.conic.branch()) * xin, SymExpr(op.order - 2.0));
    changed.terms[1].im = changed.terms[1].im + lower;
    InvarianceCase c{"representative", "Im p_{m-1} += " + lower.to_string()};
    const ThresholdReport r = compute_thresholds(changed, chart, q, opt.sweep);
    c.s0 = r.s0;
    c.delta = std::fabs(r.s0 - baseline_sweep);
    c.tolerance = opt.sweep_tol;
    c.passed = c.delta <= c.tolerance;
    rep.cases.push_back(c);
  }
  for (const auto& c : rep.cases) rep.passed = rep.passed && c.passed;
  return rep;
}

}  // namespace radialscope
