#pragma once

// Cosphere-level questions answered with the rescaled flow: does a point flow into q
// (membership in Gamma_q), and at what exponential rate does the flow approach L.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "radialscope/dynamics/flow.hpp"

namespace radialscope {

/// Conic point (y, z = root, theta = alpha, zeta = 1) on the characteristic set with the given
/// normal coordinates.
inline std::vector<double> cosphere_start(const RadialChart& chart, std::span<const double> alpha,
                                          std::span<const double> beta) {
  const std::size_t k = chart.conic.y().size();
  if (alpha.size() != k || beta.size() != k) throw InvalidParameters("alpha and beta need one entry per y");
  const CosphereField cosphere(chart);
  const auto y = cosphere.solve_y(alpha, beta);
  std::vector<double> w(y.begin(), y.end());
  w.push_back(0.0);
  w.insert(w.end(), alpha.begin(), alpha.end());
  w.push_back(1.0);
  w[k] = evaluate(chart.root, chart.conic.coordinates(), w);
  return w;
}

/// (alpha, beta) along a rescaled trajectory (columns y, z, theta, x).
class NormalCoordinates {
 public:
  explicit NormalCoordinates(const RadialChart& chart) {
    std::vector<SymExpr> out = chart.alpha;
    out.insert(out.end(), chart.beta.begin(), chart.beta.end());
    program_ = CompiledExpr(out, chart.conic.coordinates());
    k_ = chart.alpha.size();
  }

  std::size_t dimension() const { return k_; }

  /// Row from a rescaled trajectory; the trailing x column is replaced by zeta = 1.
  std::vector<double> operator()(std::span<const double> row) const {
    std::vector<double> w(row.begin(), row.end());
    w.back() = 1.0;
    return program_.evaluate_all(w);
  }

 private:
  CompiledExpr program_;
  std::size_t k_ = 0;
};

enum class GammaStatus { member, non_member, inconclusive };

inline std::string to_string(GammaStatus s) {
  switch (s) {
    case GammaStatus::member: return "member";
    case GammaStatus::non_member: return "non_member";
    default: return "inconclusive";
  }
}

struct GammaConfig {
  double enter_radius = 1e-2;    // r1
  double confirm_radius = 1e-4;  // r2 < r1
  double max_time = 60.0;
  double sample_interval = 0.05;
  double domain_radius = 2.0;  // in (alpha, beta - beta(q))
  double stall_speed = 1e-10;  // below this the flow has settled
  FlowConfig flow;
};

struct GammaResult {
  GammaStatus status = GammaStatus::inconclusive;
  std::string direction;  // "forward" or "backward" for members
  GammaStatus forward = GammaStatus::inconclusive;
  GammaStatus backward = GammaStatus::inconclusive;
  double entry_time = 0.0;
  double closest_distance = 0.0;
  Trajectory forward_path, backward_path;  // truncated at domain exit
};

namespace detail {

struct DirectionVerdict {
  GammaStatus status;
  double entry_time;
  double closest;
};

inline DirectionVerdict classify_direction(const Trajectory& traj, const NormalCoordinates& normal,
                                           std::span<const double> beta_q, const GammaConfig& cfg) {
  const std::size_t k = normal.dimension();
  std::vector<double> dist;
  for (const auto& row : traj.states) {
    const auto ab = normal(row);
    double d2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) d2 += ab[i] * ab[i] + (ab[k + i] - beta_q[i]) * (ab[k + i] - beta_q[i]);
    dist.push_back(std::sqrt(d2));
  }
  DirectionVerdict v{GammaStatus::inconclusive, 0.0, *std::min_element(dist.begin(), dist.end())};
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] >= cfg.enter_radius) continue;
    v.entry_time = traj.t[i];
    for (std::size_t j = i + 1; j < dist.size(); ++j) {
      if (dist[j] > dist[j - 1]) {
        v.status = GammaStatus::non_member;  // passes near q and turns away
        return v;
      }
      if (dist[j] < cfg.confirm_radius) {
        v.status = GammaStatus::member;
        return v;
      }
    }
    return v;  // monotone but budget ran out before confirmation
  }
  if (traj.exit == FlowExit::left_domain || traj.exit == FlowExit::overflow) {
    v.status = GammaStatus::non_member;
    return v;
  }
  if (traj.states.size() >= 2) {
    const auto& a = traj.states[traj.states.size() - 2];
    const auto& b = traj.states.back();
    double step = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) step = std::max(step, std::fabs(b[i] - a[i]));
    const double dt = std::fabs(traj.t.back() - traj.t[traj.t.size() - 2]);
    if (dt > 0.0 && step / dt < cfg.stall_speed) v.status = GammaStatus::non_member;  // settled elsewhere
  }
  return v;
}

}  // namespace detail

/// Membership of the cosphere point with normal coordinates x0 = (alpha, beta) in Gamma_q.
inline GammaResult gamma_membership(const RadialChart& chart, std::span<const double> q, std::span<const double> x0,
                                    const GammaConfig& cfg = {}) {
  const std::size_t k = chart.alpha.size();
  if (k == 0) throw PreconditionError("one-dimensional base: the radial set has no transverse directions");
  if (x0.size() != 2 * k) throw InvalidParameters("x0 must list alpha then beta");
  if (!(cfg.confirm_radius < cfg.enter_radius)) throw InvalidParameters("confirm radius must be below enter radius");
  double alpha_norm = 0.0;
  for (std::size_t i = 0; i < k; ++i) alpha_norm = std::max(alpha_norm, std::fabs(x0[i]));
  if (alpha_norm == 0.0) throw PreconditionError("x0 lies on the radial set L, where the flow is stationary");

  const std::vector<double> alpha(x0.begin(), x0.begin() + static_cast<std::ptrdiff_t>(k));
  const std::vector<double> beta(x0.begin() + static_cast<std::ptrdiff_t>(k), x0.end());
  const auto start = cosphere_start(chart, alpha, beta);
  const NormalCoordinates normal(chart);
  std::vector<double> beta_q;
  {
    auto rep = chart.representative(q);
    rep.back() = 0.0;  // x column slot; replaced by zeta = 1
    const auto ab = normal(rep);
    beta_q.assign(ab.begin() + static_cast<std::ptrdiff_t>(k), ab.end());
  }

  FlowConfig flow = cfg.flow;
  flow.sample_interval = cfg.sample_interval;
  const SymExpr p = chart.conic.to_canonical(chart.principal);
  GammaResult result;
  result.closest_distance = INFINITY;
  for (const double sign : {1.0, -1.0}) {
    // Domain exit is judged in normal coordinates, so the guard uses a generous chart bound.
    Trajectory traj = integrate_rescaled(p, chart.order, chart.conic, start, 0.0, sign * cfg.max_time, flow);
    // Truncate once the normal coordinates leave the domain radius.
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      const auto ab = normal(traj.states[i]);
      bool outside = false;
      for (std::size_t j = 0; j < k; ++j) {
        outside = outside || std::fabs(ab[j]) > cfg.domain_radius ||
                  std::fabs(ab[k + j] - beta_q[j]) > cfg.domain_radius;
      }
      if (outside) {
        traj.exit = FlowExit::left_domain;
        traj.exit_time = traj.t[i];
        traj.t.resize(i + 1);
        traj.states.resize(i + 1);
        break;
      }
    }
    const auto v = detail::classify_direction(traj, normal, beta_q, cfg);
    (sign > 0 ? result.forward : result.backward) = v.status;
    (sign > 0 ? result.forward_path : result.backward_path) = traj;
    result.closest_distance = std::min(result.closest_distance, v.closest);
    if (v.status == GammaStatus::member && result.status != GammaStatus::member) {
      result.status = GammaStatus::member;
      result.direction = sign > 0 ? "forward" : "backward";
      result.entry_time = v.entry_time;
    }
  }
  if (result.status != GammaStatus::member) {
    result.status = result.forward == GammaStatus::non_member && result.backward == GammaStatus::non_member
                        ? GammaStatus::non_member
                        : GammaStatus::inconclusive;
  }
  return result;
}

struct RateEstimate {
  double rate = 0.0;
  double residual = 0.0;  // rms deviation of log|alpha| from the fitted line
  std::size_t samples = 0;
};

/// Least-squares slope of log|alpha(t)| over the samples with floor < |alpha| <= radius; the floor
/// keeps out samples the integrator no longer resolves in relative terms.
inline RateEstimate linearization_rate(const Trajectory& traj, const RadialChart& chart, double radius = 0.05,
                                       std::size_t min_samples = 5, double floor = 0.0) {
  const NormalCoordinates normal(chart);
  const std::size_t k = normal.dimension();
  if (k == 0) throw PreconditionError("no transverse directions to measure");
  std::vector<double> ts, ls;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto ab = normal(traj.states[i]);
    double n2 = 0.0;
    for (std::size_t j = 0; j < k; ++j) n2 += ab[j] * ab[j];
    const double n = std::sqrt(n2);
    if (n > floor && n <= radius) {
      ts.push_back(traj.t[i]);
      ls.push_back(std::log(n));
    }
  }
  if (ts.size() < min_samples) throw PreconditionError("trajectory tail inside the linearization radius is too short");
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i] / n;
    ml += ls[i] / n;
  }
  double stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    stl += (ts[i] - mt) * (ls[i] - ml);
  }
  if (stt == 0.0) throw DegenerateFit("tail samples share one time");
  RateEstimate est;
  est.rate = stl / stt;
  est.samples = ts.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ls[i] - (ml + est.rate * (ts[i] - mt));
    ss += r * r;
  }
  est.residual = std::sqrt(ss / n);
  return est;
}

}  // namespace radialscope
