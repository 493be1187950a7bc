#include <gtest/gtest.h>

#include <cmath>

#include "radialscope/dynamics.hpp"

namespace rs = radialscope;
using rs::SymExpr;

namespace {

const rs::ChartSpec kLine = rs::ChartSpec::standard(1);
const rs::ChartSpec kPlane = rs::ChartSpec::standard(2);
const std::vector<double> kOrigin = {0.0};

rs::RadialChart plane_chart(const char* p) { return rs::build_normal_coordinates(rs::parse(p, kPlane), {kPlane, 1}); }

double segment_distance(std::span<const double> p, std::span<const double> a, std::span<const double> b) {
  double ab2 = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ab2 += (b[i] - a[i]) * (b[i] - a[i]);
    dot += (p[i] - a[i]) * (b[i] - a[i]);
  }
  const double s = ab2 > 0.0 ? std::clamp(dot / ab2, 0.0, 1.0) : 0.0;
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double c = a[i] + s * (b[i] - a[i]) - p[i];
    d2 += c * c;
  }
  return std::sqrt(d2);
}

// Largest distance from a point of `from` to the polyline `to`.
double one_way(const std::vector<std::vector<double>>& from, const std::vector<std::vector<double>>& to) {
  double worst = 0.0;
  for (const auto& p : from) {
    double best = INFINITY;
    for (std::size_t i = 0; i + 1 < to.size(); ++i) best = std::min(best, segment_distance(p, to[i], to[i + 1]));
    worst = std::max(worst, best);
  }
  return worst;
}

/// Symmetric Hausdorff distance between two sampled paths, treated as polylines.
double hausdorff(const std::vector<std::vector<double>>& u, const std::vector<std::vector<double>>& v) {
  return std::max(one_way(u, v), one_way(v, u));
}

std::vector<std::vector<double>> drop_last_column(const rs::Trajectory& t) {
  std::vector<std::vector<double>> out;
  for (const auto& row : t.states) out.emplace_back(row.begin(), row.end() - 1);
  return out;
}

}  // namespace

TEST(Hamilton, DilationModel) {
  const double start[] = {1.0, 1.0};
  const auto traj = rs::integrate_hamilton(rs::parse("x*xi", kLine), kLine, start, 0.0, 5.0);
  EXPECT_EQ(traj.exit, rs::FlowExit::completed);
  EXPECT_NEAR(traj.t.back(), 5.0, 1e-12);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    EXPECT_NEAR(traj.states[i][0] / std::exp(traj.t[i]), 1.0, 1e-8);
    EXPECT_NEAR(traj.states[i][1] / std::exp(-traj.t[i]), 1.0, 1e-8);
  }
  EXPECT_LT(traj.max_drift(), 1e-8);
}

TEST(Hamilton, FreeParticle) {
  const double start[] = {0.0, 1.0};
  const auto traj = rs::integrate_hamilton(rs::parse("xi^2", kLine), kLine, start, 0.0, 3.0);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    EXPECT_NEAR(traj.states[i][0], 2.0 * traj.t[i], 1e-10);
    EXPECT_NEAR(traj.states[i][1], 1.0, 1e-14);
  }
}

TEST(Hamilton, OverflowIsReported) {
  const double start[] = {1.0, 1.0};
  const auto traj = rs::integrate_hamilton(rs::parse("x*xi", kLine), kLine, start, 0.0, 1000.0);
  EXPECT_EQ(traj.exit, rs::FlowExit::overflow);
  EXPECT_GT(traj.exit_time, 200.0);
  EXPECT_LT(traj.exit_time, 1000.0);
}

TEST(Hamilton, BackwardTime) {
  const double start[] = {1.0, 1.0};
  const auto traj = rs::integrate_hamilton(rs::parse("x*xi", kLine), kLine, start, 0.0, -2.0);
  EXPECT_NEAR(traj.t.back(), -2.0, 1e-12);
  EXPECT_NEAR(traj.states.back()[0], std::exp(-2.0), 1e-9);
}

TEST(Hamilton, EnergyConservedOnCurvedSymbols) {
  for (const char* p : {"x2*xi2 + x1*xi1^2/xi2", "xi1^2 + (1 + x1^2)*xi2^2", "x2*xi2 + x2^2*xi2 + sin(x1)*xi1"}) {
    const double start[] = {0.3, -0.2, 0.4, 1.1};
    const auto traj = rs::integrate_hamilton(rs::parse(p, kPlane), kPlane, start, 0.0, 2.0);
    EXPECT_LT(traj.max_drift(), 1e-8 * (1.0 + std::fabs(traj.monitor.front()))) << p;
  }
}

TEST(Hamilton, FiberDilationRescalesTime) {
  // m = 2: dilating the fiber by c runs the same base path c times faster.
  const SymExpr p = rs::parse("xi1^2 + x1*xi1*xi2 + (1 + x2^2)*xi2^2", kPlane);
  rs::FlowConfig cfg;
  cfg.sample_interval = 0.01;
  const double base[] = {0.1, 0.2, 0.5, 0.7};
  const auto ref = rs::integrate_hamilton(p, kPlane, base, 0.0, 1.0, cfg);
  for (double c : {2.0, 10.0}) {
    const double start[] = {0.1, 0.2, 0.5 * c, 0.7 * c};
    rs::FlowConfig fast = cfg;
    fast.sample_interval = 0.01 / c;
    const auto traj = rs::integrate_hamilton(p, kPlane, start, 0.0, 1.0 / c, fast);
    ASSERT_EQ(traj.t.size(), ref.t.size());
    for (std::size_t i = 0; i < ref.t.size(); ++i) {
      EXPECT_NEAR(traj.states[i][0], ref.states[i][0], 1e-6);
      EXPECT_NEAR(traj.states[i][1], ref.states[i][1], 1e-6);
      EXPECT_NEAR(traj.states[i][2] / c, ref.states[i][2], 1e-6);
      EXPECT_NEAR(traj.states[i][3] / c, ref.states[i][3], 1e-6);
    }
  }
}

TEST(Rescaled, LinearModelClosedForm) {
  const auto chart = plane_chart("x2*xi2");
  // (y, z, theta, zeta) = (0.2, 0, 0.1, 4): alpha = 0.1 e^t, beta = 0.2, x = e^t / 4.
  const double start[] = {0.2, 0.0, 0.1, 4.0};
  const auto traj = rs::integrate_rescaled(rs::parse("x2*xi2", kPlane), 1.0, chart.conic, start, 0.0, 3.0);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double e = std::exp(traj.t[i]);
    EXPECT_NEAR(traj.states[i][2], 0.1 * e, 1e-8 * e);
    EXPECT_NEAR(traj.states[i][0], 0.2, 1e-12);
    EXPECT_NEAR(traj.states[i][3], 0.25 * e, 1e-8 * e);
    EXPECT_LT(traj.monitor[i], 1e-8);
  }
}

TEST(Rescaled, LambdaZeroRelationOnCurvedModels) {
  for (const char* p : {"x2*xi2 + x2^2*xi2", "x2*xi2 + x1*xi1^2/xi2"}) {
    const auto chart = plane_chart(p);
    const double start[] = {0.1, 0.05, 0.2, 2.0};
    const auto traj = rs::integrate_rescaled(rs::parse(p, kPlane), 1.0, chart.conic, start, 0.0, 2.0);
    for (double r : traj.monitor) EXPECT_LT(r, 1e-8) << p;
  }
}

TEST(Rescaled, ReparameterizationKeepsPath) {
  // m = 2 so a constant rescaling of zeta changes the time scale.
  const SymExpr p = rs::parse("x2*xi2^2 + x1*xi1^2", kPlane);
  const auto chart = rs::build_normal_coordinates(p, {kPlane, 1});
  const double start[] = {0.3, 0.0, 0.1, 1.0};
  rs::FlowConfig cfg;
  cfg.sample_interval = 0.002;
  const auto ref = rs::integrate_rescaled(p, 2.0, chart.conic, start, 0.0, 1.0, cfg);
  const SymExpr doubled = 2.0 * SymExpr::variable("xi2");
  const auto other = rs::integrate_rescaled(p, 2.0, chart.conic, start, 0.0, 2.0, cfg, &doubled);
  EXPECT_LT(hausdorff(drop_last_column(ref), drop_last_column(other)), 1e-6);
  // The time scale does change: at equal times the states differ.
  EXPECT_GT(std::fabs(ref.states.back()[2] - other.states[ref.states.size() - 1][2]), 1e-3);
  for (double r : other.monitor) EXPECT_LT(r, 1e-8);
  // A non-constant positive factor also keeps the path.
  const SymExpr varying = (2.0 + rs::parse("sin(x1)", kPlane)) * SymExpr::variable("xi2");
  const auto third = rs::integrate_rescaled(p, 2.0, chart.conic, start, 0.0, 3.0, cfg, &varying);
  // Compare both paths on the common stretch theta <= theta_end.
  const double theta_end = std::min(ref.states.back()[2], third.states.back()[2]);
  auto upto = [theta_end](const rs::Trajectory& t) {
    std::vector<std::vector<double>> out;
    for (const auto& row : drop_last_column(t)) {
      if (row[2] <= theta_end) out.push_back(row);
    }
    return out;
  };
  // Clipped samples against the unclipped other path, so the cut does not leave an end gap.
  EXPECT_LT(one_way(upto(third), drop_last_column(ref)), 1e-6);
  EXPECT_LT(one_way(upto(ref), drop_last_column(third)), 1e-6);
}

TEST(Gamma, SourceModelMembers) {
  const auto chart = plane_chart("x2*xi2");
  const double x0[] = {0.1, 0.0};
  const auto res = rs::gamma_membership(chart, kOrigin, x0);
  EXPECT_EQ(res.status, rs::GammaStatus::member);
  EXPECT_EQ(res.direction, "backward");
  EXPECT_EQ(res.forward, rs::GammaStatus::non_member);
  EXPECT_NEAR(res.entry_time, -std::log(10.0), 0.06);
}

TEST(Gamma, OffsetBetaIsNotMember) {
  const auto chart = plane_chart("x2*xi2");
  const double x0[] = {0.1, 0.5};
  const auto res = rs::gamma_membership(chart, kOrigin, x0);
  EXPECT_EQ(res.status, rs::GammaStatus::non_member);
  EXPECT_NEAR(res.closest_distance, 0.5, 1e-6);
}

TEST(Gamma, ShortBudgetIsInconclusive) {
  const auto chart = plane_chart("x2*xi2");
  const double x0[] = {0.1, 0.5};
  rs::GammaConfig cfg;
  cfg.max_time = 1.0;
  EXPECT_EQ(rs::gamma_membership(chart, kOrigin, x0, cfg).status, rs::GammaStatus::inconclusive);
}

TEST(Gamma, PointOnRadialSetRejected) {
  const auto chart = plane_chart("x2*xi2");
  const double x0[] = {0.0, 0.3};
  EXPECT_THROW(rs::gamma_membership(chart, kOrigin, x0), rs::PreconditionError);
}

TEST(Gamma, SinkMembersForward) {
  const auto chart = plane_chart("-x2*xi2");
  const double x0[] = {0.1, 0.0};
  const auto res = rs::gamma_membership(chart, kOrigin, x0);
  EXPECT_EQ(res.status, rs::GammaStatus::member);
  EXPECT_EQ(res.direction, "forward");
}

TEST(Gamma, CurvedModelBetaDrifts) {
  // p = zeta (z + y theta^2) with q at y = 0.3: beta moves only at second order in alpha.
  const auto chart = plane_chart("x2*xi2 + x1*xi1^2/xi2");
  const double q[] = {0.3};
  const double x0[] = {1e-3, 0.3};
  EXPECT_EQ(rs::gamma_membership(chart, q, x0).status, rs::GammaStatus::member);
  const double off[] = {1e-3, 0.4};
  EXPECT_EQ(rs::gamma_membership(chart, q, off).status, rs::GammaStatus::non_member);
}

TEST(Rate, SourceAndSinkModels) {
  for (const auto& [p, expected] : {std::pair{"x2*xi2", 1.0}, std::pair{"-x2*xi2", -1.0}}) {
    const auto chart = plane_chart(p);
    const double start[] = {0.0, 0.0, 0.01, 1.0};
    const auto traj = rs::integrate_rescaled(rs::parse(p, kPlane), 1.0, chart.conic, start, 0.0, expected * 3.0);
    const auto est = rs::linearization_rate(traj, chart);
    // Backward runs for the source record decreasing t; the slope is in t either way.
    EXPECT_NEAR(est.rate, expected, 0.01) << p;
    const auto cls = rs::sink_source_classify(chart, kOrigin);
    EXPECT_EQ(est.rate > 0, cls.lambda0 > 0);
  }
}

TEST(Rate, PerturbedModelApproachesLambdaZero) {
  const char* p = "x2*xi2 + x2^2*xi2";
  const auto chart = plane_chart(p);
  const double lambda0 = rs::sink_source_classify(chart, kOrigin).lambda0;
  double previous = INFINITY;
  for (double a : {0.2, 0.05, 0.01}) {
    const double start[] = {0.0, 0.08 * a / 0.2, a, 1.0};
    const auto traj = rs::integrate_rescaled(rs::parse(p, kPlane), 1.0, chart.conic, start, 0.0, -4.0);
    const auto est = rs::linearization_rate(traj, chart, 1.0);
    const double err = std::fabs(est.rate - lambda0) / std::fabs(lambda0);
    EXPECT_LE(err, previous + 1e-12);
    previous = err;
  }
  EXPECT_LT(previous, 0.05);
}

TEST(Rate, ShortTailRejected) {
  const auto chart = plane_chart("x2*xi2");
  const double start[] = {0.0, 0.0, 0.5, 1.0};
  const auto traj = rs::integrate_rescaled(rs::parse("x2*xi2", kPlane), 1.0, chart.conic, start, 0.0, 1.0);
  EXPECT_THROW(rs::linearization_rate(traj, chart, 0.05), rs::PreconditionError);
}

TEST(Blowup, TrajectoriesCrossRadialLevelsMonotonically) {
  const auto chart = plane_chart("x2*xi2 + x1*xi1^2/xi2");
  const double q[] = {0.2};
  const double alpha[] = {0.02}, beta[] = {0.2};
  const auto start = rs::cosphere_start(chart, alpha, beta);
  const auto traj = rs::integrate_rescaled(chart.conic.to_canonical(chart.principal), 1.0, chart.conic, start, 0.0,
                                           -6.0);
  const rs::NormalCoordinates normal(chart);
  double last = INFINITY;
  for (const auto& row : traj.states) {
    const double r = std::fabs(normal(row)[0]);
    EXPECT_LT(r, last);
    last = r;
  }
  // The hand-derived cosphere field is the library's, and its lift keeps one radial sign near r = 0.
  const rs::CosphereField field(chart);
  const std::vector<std::string> vars = {"a1", "b1"};
  const rs::VectorFieldSym sym(vars, {rs::parse("a1 - a1^2", vars), rs::parse("-2*b1*a1^2/(1 - 2*a1)", vars)});
  for (double a : {-0.1, 0.02, 0.2}) {
    const std::vector<double> point = {a, q[0]};
    const auto [da, db] = field(std::vector<double>{a}, std::vector<double>{q[0]});
    EXPECT_NEAR(da[0], rs::evaluate(sym["a1"], vars, point), 1e-12);
    EXPECT_NEAR(db[0], rs::evaluate(sym["b1"], vars, point), 1e-12);
  }
  const auto lift = rs::blowup_lift(sym, rs::BlowupChart::standard(1));
  const double radii[] = {0.0, 1e-3, 1e-2};
  EXPECT_GT(lift.radial_lower_bound(radii, 1.0), 0.0);
}
