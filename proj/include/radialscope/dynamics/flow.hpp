#pragma once

// Bicharacteristics of H_p in the canonical chart, and the degree-0 rescaled field
// W_p = zeta^{1-m} H_p in the conic chart. The rescaled flow is integrated in
// (y, z, theta, l = log zeta); the fiber variable is reported as x = 1/zeta, which obeys
// W_p x = lambda0 x with lambda0 = lambda / zeta^m.

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "radialscope/geometry.hpp"

namespace radialscope {

struct FlowConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.0;         // 0 leaves the step unbounded
  double sample_interval = 0.0;  // > 0 samples on a uniform time grid, otherwise every accepted step
  double initial_step = 1e-3;
  double overflow = 1e100;       // |state| beyond this ends the run
  double domain_radius = std::numeric_limits<double>::infinity();  // exit when a chart coordinate leaves it

  void validate() const {
    if (!(rel_tol > 0.0 && abs_tol > 0.0)) throw InvalidParameters("integrator tolerances must be positive");
    if (!(initial_step > 0.0) || max_step < 0.0 || sample_interval < 0.0) {
      throw InvalidParameters("step bounds must be positive");
    }
  }
};

enum class FlowExit { completed, overflow, left_domain };

inline std::string to_string(FlowExit e) {
  switch (e) {
    case FlowExit::completed: return "completed";
    case FlowExit::overflow: return "overflow";
    default: return "left_domain";
  }
}

struct Trajectory {
  std::vector<std::string> names;
  std::vector<double> t;
  std::vector<std::vector<double>> states;
  std::vector<double> monitor;  // p along H_p flows; |W_p x - lambda0 x| along rescaled flows
  FlowExit exit = FlowExit::completed;
  double exit_time = 0.0;

  std::size_t column(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InvalidParameters("trajectory has no coordinate '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
  }

  /// max |monitor - monitor[0]|
  double max_drift() const {
    double d = 0.0;
    for (double v : monitor) d = std::max(d, std::fabs(v - monitor.front()));
    return d;
  }
};

namespace detail {

using FlowState = std::vector<double>;

struct StopIntegration {};

/// Integrates x' = rhs(x) from t0 to t1 (either direction), recording samples via `record`.
/// `guard` returns the exit reason for a state (completed = keep going).
template <typename Rhs, typename Record, typename Guard>
FlowExit run_flow(Rhs rhs, FlowState x, double t0, double t1, const FlowConfig& cfg, Record record, Guard guard,
                  double& exit_time) {
  namespace odeint = boost::numeric::odeint;
  cfg.validate();
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const double span = std::fabs(t1 - t0);
  // Backward time runs the negated field forward in s = dir * (t - t0).
  auto system = [&](const FlowState& s, FlowState& ds, double) {
    rhs(s, ds);
    if (dir < 0) {
      for (auto& v : ds) v = -v;
    }
  };
  FlowExit reason = FlowExit::completed;
  exit_time = t1;
  auto observer = [&](const FlowState& s, double tau) {
    const double t = t0 + dir * tau;
    const FlowExit g = guard(s);
    if (g != FlowExit::completed) {
      reason = g;
      exit_time = t;
      throw StopIntegration{};
    }
    record(s, t);
  };
  using Stepper = odeint::runge_kutta_dopri5<FlowState>;
  try {
    if (cfg.max_step > 0.0) {
      auto stepper = odeint::make_dense_output(cfg.abs_tol, cfg.rel_tol, cfg.max_step, Stepper());
      if (cfg.sample_interval > 0.0) {
        odeint::integrate_const(stepper, system, x, 0.0, span, cfg.sample_interval, observer);
      } else {
        odeint::integrate_adaptive(stepper, system, x, 0.0, span, cfg.initial_step, observer);
      }
    } else {
      auto stepper = odeint::make_dense_output(cfg.abs_tol, cfg.rel_tol, Stepper());
      if (cfg.sample_interval > 0.0) {
        odeint::integrate_const(stepper, system, x, 0.0, span, cfg.sample_interval, observer);
      } else {
        odeint::integrate_adaptive(stepper, system, x, 0.0, span, cfg.initial_step, observer);
      }
    }
  } catch (const StopIntegration&) {
  }
  return reason;
}

inline FlowExit state_guard(const FlowState& s, const FlowConfig& cfg, std::size_t chart_dims) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || std::fabs(s[i]) > cfg.overflow) return FlowExit::overflow;
    if (i < chart_dims && std::fabs(s[i]) > cfg.domain_radius) return FlowExit::left_domain;
  }
  return FlowExit::completed;
}

}  // namespace detail

/// Integral curve of H_p through `start` (canonical coordinates x..., xi...).
inline Trajectory integrate_hamilton(const SymExpr& p, const ChartSpec& chart, std::span<const double> start,
                                     double t0, double t1, const FlowConfig& cfg = {}) {
  chart.require_canonical();
  const auto names = chart.coordinates();
  if (start.size() != names.size()) throw InvalidParameters("start point has the wrong dimension");
  const VectorFieldSym field = hamilton_field(p, chart);
  const CompiledExpr rhs(field.coefficients, names);
  const CompiledExpr energy(p, names);

  Trajectory traj;
  traj.names = names;
  std::vector<double> scratch;
  detail::FlowState x(start.begin(), start.end());
  traj.exit = detail::run_flow(
      [&](const detail::FlowState& s, detail::FlowState& ds) {
        ds.resize(s.size());
        rhs.evaluate(s, ds, scratch);
      },
      x, t0, t1, cfg,
      [&](const detail::FlowState& s, double t) {
        traj.t.push_back(t);
        traj.states.push_back(s);
        traj.monitor.push_back(energy(s));
      },
      [&](const detail::FlowState& s) { return detail::state_guard(s, cfg, s.size()); }, traj.exit_time);
  return traj;
}

/// Flow of W = zeta'^{1-m} H_p for a degree-1 fiber variable zeta' (the chart zeta by default),
/// started at a conic point (y, z, theta, zeta). States are reported as (y, z, theta, x = 1/zeta').
/// The monitor holds |W x - lambda0 x| / max(1, |x|) with lambda0 = -H_p zeta' / zeta'^m computed
/// from the canonical Hamilton field.
inline Trajectory integrate_rescaled(const SymExpr& p, double m, const ConicChart& chart, std::span<const double> start,
                                     double t0, double t1, const FlowConfig& cfg = {},
                                     const SymExpr* fiber_variable = nullptr) {
  const ChartSpec& canonical = chart.canonical();
  const auto conic = chart.coordinates();
  if (start.size() != conic.size()) throw InvalidParameters("start point has the wrong dimension");
  if (!(start.back() > 0.0)) throw PreconditionError("zeta must be positive at the start");
  const std::size_t dims = conic.size() - 1;

  const SymExpr zeta_chart = SymExpr::variable(chart.zeta());
  const SymExpr zeta_prime = fiber_variable ? chart.to_conic(*fiber_variable) : zeta_chart;
  const SymExpr g = zeta_prime / zeta_chart;  // degree 0
  const SymExpr scale = pow(g, SymExpr(1.0 - m));
  const VectorFieldSym hp = conic_hamilton_field(chart.to_conic(p), chart);

  // Degree-0 components, evaluated at zeta = 1.
  std::vector<SymExpr> rates;
  const std::map<std::string, SymExpr> unit = {{chart.zeta(), SymExpr(1.0)}};
  for (std::size_t i = 0; i < dims; ++i) rates.push_back(substitute(scale * hp.coefficients[i], unit));
  rates.push_back(substitute(scale * hp.coefficients[dims] / zeta_chart, unit));  // d(log zeta)/dt
  const CompiledExpr rhs(rates, conic);

  // Independent check of W x = lambda0 x from the canonical field.
  const VectorFieldSym canonical_hp = hamilton_field(p, canonical);
  const SymExpr zp_canonical = fiber_variable ? *fiber_variable : chart.to_canonical(zeta_chart);
  const SymExpr lambda0 = -canonical_hp.apply(zp_canonical) / pow(zp_canonical, SymExpr(m));
  const SymExpr w_scale = pow(zp_canonical, SymExpr(1.0 - m));
  const CompiledExpr check(std::vector<SymExpr>{lambda0, w_scale * canonical_hp.apply(1.0 / zp_canonical),
                                                1.0 / zp_canonical},
                           canonical.coordinates());

  Trajectory traj;
  traj.names.assign(conic.begin(), conic.end() - 1);
  traj.names.push_back("x");
  std::vector<double> scratch, point(conic.size());
  detail::FlowState s(start.begin(), start.end());
  s.back() = std::log(start.back());
  traj.exit = detail::run_flow(
      [&](const detail::FlowState& st, detail::FlowState& ds) {
        std::copy(st.begin(), st.end() - 1, point.begin());
        point.back() = 1.0;
        ds.resize(st.size());
        rhs.evaluate(point, ds, scratch);
      },
      s, t0, t1, cfg,
      [&](const detail::FlowState& st, double t) {
        std::copy(st.begin(), st.end() - 1, point.begin());
        point.back() = std::exp(st.back());
        const auto c = check.evaluate_all(chart.point_to_canonical(point));
        const double x = c[2];
        traj.t.push_back(t);
        std::vector<double> row(st.begin(), st.end() - 1);
        row.push_back(x);
        traj.states.push_back(std::move(row));
        traj.monitor.push_back(std::fabs(c[1] - c[0] * x) / std::max(1.0, std::fabs(x)));
      },
      [&](const detail::FlowState& st) {
        if (!std::isfinite(st.back()) || std::fabs(st.back()) > std::log(cfg.overflow)) return FlowExit::overflow;
        return detail::state_guard(st, cfg, dims);
      },
      traj.exit_time);
  return traj;
}

}  // namespace radialscope
