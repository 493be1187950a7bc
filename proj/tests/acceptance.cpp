// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "radialscope/commutant.hpp"
#include "radialscope/dynamics.hpp"
#include "radialscope/probe.hpp"
#include "support/models.hpp"
#include "support/quadrature_oracle.hpp"

namespace rs = radialscope;
using namespace std::complex_literals;

namespace {

using Clock = std::chrono::steady_clock;

const rs::ChartSpec kPlane = rs::ChartSpec::standard(2);
const std::vector<double> kNoBase;
const std::vector<double> kOrigin = {0.0};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a named check; every failing check is listed.
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

rs::RadialChart plane_chart(const char* p) { return rs::build_normal_coordinates(rs::parse(p, kPlane), {kPlane, 1}); }

// Threshold formula on x D_x - c, with the adjoint pinned by quadrature pairings.
void model_thresholds(Outcome& out) {
  const auto t0 = Clock::now();
  const std::complex<double> cs[] = {0.0, 0.25i, -0.25i, 0.3 + 0.25i};
  double worst = 0.0, worst_pairing = 0.0;
  bool closed_form = true;
  for (std::size_t k = 0; k < std::size(cs); ++k) {
    const auto op = models::xdx(cs[k]);
    const auto rep = rs::compute_thresholds(op, models::chart_for(op), kNoBase);
    closed_form = closed_form && rep.homogeneous && rep.sweep.empty();
    worst = std::max(worst, std::fabs(rep.s0 - (0.5 - cs[k].imag())));
    worst_pairing = std::max(worst_pairing, oracle::adjoint_defect(op, 20, 100 + k));
  }
  const double secs = seconds_since(t0);
  out.detail << "max|s0 - (1/2 - Im c)| = " << worst << ", max pairing defect = " << worst_pairing << ", " << secs
             << " s";
  out.expect(worst < 1e-9, "s0 off the closed form");
  out.expect(worst_pairing < 1e-6, "adjoint pairing");
  out.expect(closed_form, "homogeneous formula not used");
  out.expect(secs < 5.0, "runtime");
}

// Measured critical exponent of x_+^{ic} against s0 on 2^20 points.
void numerical_thresholds(Outcome& out) {
  const auto t0 = Clock::now();
  rs::ProbeConfig cfg;
  cfg.grid.points = std::size_t{1} << 20;
  const auto table = rs::threshold_experiment({0.0, 0.25i, -0.25i}, cfg);
  const double secs = seconds_since(t0);
  for (const auto& r : table.rows) out.detail << "c=" << r.c << ": s*=" << r.s_star << " s0=" << r.s0 << "; ";
  out.detail << "max error " << table.max_error << ", " << secs << " s";
  out.expect(table.max_error < 0.1, "s* outside 0.1 of s0");
  out.expect(secs < 60.0, "runtime");
}

struct CommutantCase {
  const char* name;
  rs::OperatorSpec op;
  std::vector<double> q;
  std::size_t per_axis;  // enough box points for 10^4 samples per t
};

rs::CommutantSymbols build_commutant(const CommutantCase& c, const rs::RadialChart& chart,
                                     const rs::RegularizerSpec& reg) {
  const rs::SymExpr a = rs::subprincipal_difference(c.op);
  rs::CutoffSearch search;
  search.per_axis = c.per_axis;
  const auto cut = rs::make_cutoffs(chart, c.q, reg.kind, search, rs::RadicandConstraint{reg, a, {}});
  return rs::build_symbols(chart, reg, cut, a);
}

void commutator_identity(Outcome& out) {
  const std::vector<CommutantCase> cases = {
      {"xDx-0.25i", models::xdx(0.25i), kNoBase, 2000},
      {"curved planar", models::op(kPlane, 1, "x2*xi2 + x1*xi1^2/xi2", "0", "0.1*xi1/xi2"), kOrigin, 13},
  };
  double worst = 0.0;
  std::size_t fewest = SIZE_MAX;
  for (const auto& c : cases) {
    const auto chart = models::chart_for(c.op);
    const double s0 = rs::s0(c.op, chart, c.q);
    const double s1 = rs::s1_bound(c.op, chart, c.q);
    const rs::SymExpr a = rs::subprincipal_difference(c.op);

    rs::RegularizerSpec below;
    below.kind = rs::RegularizerCase::below_s0;
    below.m = 1.0;
    below.s = s0 - 0.3;
    rs::RegularizerSpec above = below;
    above.kind = rs::RegularizerCase::above_s1;
    above.s1 = s1 + 0.05;
    above.s = above.s1 + 0.4;

    for (const auto& reg : {below, above}) {
      const auto sym = build_commutant(c, chart, reg);
      const auto id = rs::verify_commutator_identity(sym, c.op.principal(), a, 1e-8);
      worst = std::max(worst, id.max_residual);
      fewest = std::min(fewest, id.points_per_t);
      out.expect(id.passed, std::string(c.name) + " " + rs::to_string(reg.kind) + " identity");
      out.expect(id.t.size() == 11 && id.t.front() == 0.0 && std::fabs(id.t.back() - 1.0) < 1e-15,
                 std::string(c.name) + " t ladder");
    }

    // Crossing the threshold by 0.1 must surface as a sign violation.
    auto crossing_rejected = [&](rs::RegularizerSpec reg) {
      try {
        build_commutant(c, chart, reg);
      } catch (const rs::SignViolation&) {
        return true;
      }
      return false;
    };
    rs::RegularizerSpec past_s0 = below;
    past_s0.s = s0 + 0.1;
    rs::RegularizerSpec under_s1 = above;
    under_s1.s1 = s1 - 0.1;
    out.expect(crossing_rejected(past_s0), std::string(c.name) + " s0 + 0.1 accepted");
    out.expect(crossing_rejected(under_s1), std::string(c.name) + " s1 - 0.1 accepted");
  }
  out.detail << "max residual " << worst << " over t = 0, 0.1, ..., 1 with >= " << fewest
             << " points per t; threshold crossings by 0.1 raise sign violations";
  out.expect(worst < 1e-8, "residual");
  out.expect(fewest >= 10000, "grid smaller than 10^4 points");
}

void normal_form(Outcome& out) {
  double worst = 0.0;
  for (const char* p : {"x2*xi2", "x2*xi2 + x1*xi1^2/xi2"}) {
    rs::EigenOptions opt;
    opt.samples = 50;
    opt.tol = 1e-9;
    const auto rep = rs::verify_eigen_relations(plane_chart(p), opt);
    worst = std::max(worst, rep.max_residual);
    out.expect(rep.passed, std::string("eigen relations for ") + p + " (" + rep.first_violation + ")");
  }
  double push = 0.0;
  for (const char* p : {"x2*xi2", "x2*xi2 + x1*xi1^2/xi2", "x2*xi2^2 + x1^2*xi1^2 + x2*xi1*xi2"}) {
    for (int branch : {1, -1}) {
      const rs::ConicChart cc(kPlane, branch);
      const rs::SymExpr sym = rs::parse(p, kPlane);
      const auto direct = cc.pushforward(rs::hamilton_field(sym, kPlane));
      const auto formula = rs::conic_hamilton_field(cc.to_conic(sym), cc);
      for (const auto& name : cc.coordinates()) {
        const auto cmp = rs::equal_on_samples(direct[name], formula[name], rs::conic_box(cc), 100, 17, 1e-9);
        push = std::max(push, cmp.max_residual);
      }
    }
  }
  out.detail << "max eigen residual " << worst << " (50 samples), max pushforward residual " << push
             << " (100 points, seed 17)";
  out.expect(worst < 1e-9, "eigen residual");
  out.expect(push < 1e-9, "pushforward identity");
}

void dynamics(Outcome& out) {
  struct Model {
    const char* p;
    const char* member_direction;
  };
  const Model suite[] = {{"x2*xi2", "backward"}, {"-x2*xi2", "forward"}, {"x2*xi2 + x1*xi1^2/xi2", "backward"}};
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sign = [&] { return unit(rng) < 0.5 ? -1.0 : 1.0; };
  std::size_t matched = 0, total = 0, rates = 0;
  double worst_rate = 0.0, monitor = 0.0;
  for (const auto& m : suite) {
    const auto chart = plane_chart(m.p);
    const double lambda0 = rs::sink_source_classify(chart, kOrigin).lambda0;
    const rs::NormalCoordinates normal(chart);
    auto rep = chart.representative(kOrigin);
    rep.back() = 0.0;
    const double beta_q = normal(rep)[1];
    for (int i = 0; i < 20; ++i) {
      // beta = beta(q) keeps the start on the stable fiber of q; any offset leaves it for good.
      const bool on_fiber = i % 2 == 0;
      const double x0[] = {sign() * (0.03 + 0.07 * unit(rng)), beta_q + (on_fiber ? 0.0 : sign() * (0.1 + 0.4 * unit(rng)))};
      const auto g = rs::gamma_membership(chart, kOrigin, x0);
      ++total;
      const bool expected_member = on_fiber;
      const bool member = g.status == rs::GammaStatus::member;
      if (member == expected_member && (!member || g.direction == m.member_direction)) ++matched;
      for (const auto* path : {&g.forward_path, &g.backward_path}) {
        for (double v : path->monitor) monitor = std::max(monitor, v);
      }
      if (member) {
        const auto est = rs::linearization_rate(g.direction == "forward" ? g.forward_path : g.backward_path, chart,
                                                0.05, 5, 1e-9);
        worst_rate = std::max(worst_rate, std::fabs(est.rate - lambda0) / std::fabs(lambda0));
        ++rates;
      }
    }
  }
  out.detail << "Gamma_q decisions " << matched << "/" << total << ", worst rate error " << 100.0 * worst_rate
             << "% over " << rates << " members, max |W_p x - lambda0 x| " << monitor;
  out.expect(matched == total, "membership");
  out.expect(rates > 0 && worst_rate < 0.05, "linearization rate");
  out.expect(monitor < 1e-8, "W_p x monitor");
}

void invariance(Outcome& out) {
  struct Case {
    rs::OperatorSpec op;
    std::vector<double> q;
  };
  const std::vector<Case> cases = {
      {models::xdx(0.0), kNoBase},
      {models::xdx(0.25i), kNoBase},
      {models::xdx(0.3 + 0.25i), kNoBase},
      {models::op(kPlane, 2, "x2*xi2^2 + x1*xi1^2", "0", "0.2*xi2 + x1*xi1"), {0.4}},
  };
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& c : cases) {
    const auto rep = rs::invariance_check(c.op, models::chart_for(c.op), c.q);
    int zeta = 0, density = 0;
    for (const auto& k : rep.cases) {
      worst = std::max(worst, k.delta);
      zeta += k.kind == "zeta";
      density += k.kind == "density";
      out.expect(k.same_classification, "classification changed under " + k.change);
      ++checked;
    }
    out.expect(rep.passed, "invariance report");
    out.expect(zeta == 10 && density == 5, "case counts");
  }
  out.detail << "max |delta s0| " << worst << " over " << checked << " changes, classification stable";
  out.expect(worst < 1e-9, "s0 moved");
}

// Hand-derived cosphere fields for the model suite, in (a1, b1).
void blowup(Outcome& out) {
  struct Model {
    const char* p;
    const char* alpha_rate;
    const char* beta_rate;
  };
  const Model suite[] = {
      {"x2*xi2", "a1", "0"},
      {"-x2*xi2", "-a1", "0"},
      {"x2*xi2 + x2^2*xi2", "a1", "0"},
      {"x2*xi2 + x1*xi1^2/xi2", "a1 - a1^2", "-2*b1*a1^2/(1 - 2*a1)"},
      {"-x2*xi2 - x1*xi1^2/xi2", "-a1 + a1^2", "2*b1*a1^2/(1 - 2*a1)"},
  };
  const std::vector<std::string> vars = {"a1", "b1"};
  const double radii[] = {0.0, 1e-5, 1e-4, 5e-4, 1e-3};
  double worst_ratio = INFINITY, worst_mismatch = 0.0;
  for (const auto& m : suite) {
    const auto chart = plane_chart(m.p);
    const double lambda0 = rs::sink_source_classify(chart, kOrigin).lambda0;
    const rs::VectorFieldSym field(vars, {rs::parse(m.alpha_rate, vars), rs::parse(m.beta_rate, vars)});

    // The hand-derived field must be the library's cosphere field.
    const rs::CosphereField cosphere(chart);
    for (double a : {-0.2, -0.01, 0.05, 0.3}) {
      for (double b : {-0.4, 0.0, 0.7}) {
        const auto [da, db] = cosphere(std::vector<double>{a}, std::vector<double>{b});
        const std::vector<double> point = {a, b};
        worst_mismatch = std::max({worst_mismatch, std::fabs(da[0] - rs::evaluate(field[vars[0]], vars, point)),
                                   std::fabs(db[0] - rs::evaluate(field[vars[1]], vars, point))});
      }
    }

    const auto lift = rs::blowup_lift(field, rs::BlowupChart::standard(1));
    bool finite = true;
    for (const auto& w : lift.directions()) {
      for (const auto& b : lift.beta_samples()) {
        for (double v : lift.vperp(0.0, w, b)) finite = finite && std::isfinite(v);
      }
    }
    out.expect(finite, std::string(m.p) + " front face");
    const double bound = lift.radial_lower_bound(radii, lambda0 > 0.0 ? 1.0 : -1.0);
    worst_ratio = std::min(worst_ratio, bound / std::fabs(lambda0));
  }
  out.detail << "min r-component / |lambda0| on r <= 1e-3: " << worst_ratio
             << ", hand-derived vs cosphere field mismatch " << worst_mismatch;
  out.expect(worst_ratio >= 0.5, "r-component bound");
  out.expect(worst_mismatch < 1e-10, "hand-derived field disagrees");
}

void calibration(Outcome& out) {
  rs::ProbeConfig cfg;
  cfg.grid.points = std::size_t{1} << 20;
  const rs::ModelSpec heaviside{rs::ModelKind::heaviside}, delta{rs::ModelKind::delta}, gaussian{rs::ModelKind::gaussian};
  const double h = rs::probe_model(heaviside, cfg).estimate.s_star;
  const double d = rs::probe_model(delta, cfg).estimate.s_star;
  const bool smooth = rs::probe_model(gaussian, cfg).estimate.smooth;
  rs::ProbeConfig narrow = cfg, fine = cfg;
  narrow.window.half_width /= 2.0;
  fine.grid.points *= 2;
  double window_shift = 0.0, grid_shift = 0.0;
  for (const auto& [model, base] : {std::pair{heaviside, h}, std::pair{delta, d}}) {
    window_shift = std::max(window_shift, std::fabs(rs::probe_model(model, narrow).estimate.s_star - base));
    grid_shift = std::max(grid_shift, std::fabs(rs::probe_model(model, fine).estimate.s_star - base));
  }
  out.detail << "heaviside " << h << ", delta " << d << ", gaussian " << (smooth ? "smooth" : "not smooth")
             << ", window halving shift " << window_shift << ", grid doubling shift " << grid_shift;
  out.expect(std::fabs(h - 0.5) <= 0.05, "heaviside");
  out.expect(std::fabs(d + 0.5) <= 0.05, "delta");
  out.expect(smooth, "gaussian");
  out.expect(window_shift < 0.05, "window halving");
  out.expect(grid_shift < 0.03, "grid doubling");
  out.expect(std::fabs(h - d - 1.0) <= 0.07, "heaviside - delta");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"threshold formula on x D_x - c", model_thresholds},
      {"measured critical exponent vs s0", numerical_thresholds},
      {"commutator identity and threshold crossings", commutator_identity},
      {"normal-form eigen relations and pushforward", normal_form},
      {"rescaled-flow rates, monitor, Gamma_q", dynamics},
      {"threshold invariance", invariance},
      {"blow-up front face", blowup},
      {"probe calibration", calibration},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    all = all && out.pass;
    std::printf("criterion %zu %s  %s (%.2f s): %s\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first,
                seconds_since(t0), out.detail.str().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
