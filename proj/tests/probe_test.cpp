#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "radialscope/probe.hpp"
#include "support/fourier_oracle.hpp"

namespace rs = radialscope;
using namespace std::complex_literals;

namespace {

rs::GridSpec grid(int log2_points = 18) {
  rs::GridSpec g;
  g.points = std::size_t{1} << log2_points;
  return g;
}

rs::ProbeConfig config(int log2_points = 18) {
  rs::ProbeConfig cfg;
  cfg.grid = grid(log2_points);
  return cfg;
}

double s_star(const rs::ModelSpec& m, const rs::ProbeConfig& cfg) { return rs::probe_model(m, cfg).estimate.s_star; }

rs::ModelSpec xplus(std::complex<double> a) { return {rs::ModelKind::xplus_power, a}; }

rs::ShellSpectrum synthetic(int lo, int hi, double slope) {
  rs::ShellSpectrum s{{lo, hi}, {}};
  for (int j = lo; j <= hi; ++j) s.energies.push_back(3.0 * std::exp2(slope * j));
  return s;
}

}  // namespace

TEST(Sampling, HeavisideJumpsMidCell) {
  const auto g = grid(10);
  const auto u = rs::sample_model_solution({rs::ModelKind::heaviside}, g);
  const std::size_t mid = g.points / 2;
  EXPECT_NEAR(g.position(mid), g.spacing() / 2.0, 1e-15);
  EXPECT_NEAR(g.position(mid - 1), -g.spacing() / 2.0, 1e-15);
  EXPECT_EQ(u.values[mid - 1], 0.0);
  EXPECT_EQ(u.values[mid], 1.0);
  for (std::size_t i = 0; i < g.points; ++i) {
    const double x = g.position(i);
    const double expected = x > 0.0 ? u.window(x) : 0.0;
    EXPECT_DOUBLE_EQ(u.values[i].real(), expected);
  }
}

TEST(Sampling, OscillatoryPowerFormula) {
  const auto g = grid(10);
  const double c = 0.7;
  const auto u = rs::sample_model_solution(xplus(1i * c), g, {0.0, 1.0, 0.9});
  for (std::size_t i = 0; i < g.points; ++i) {
    const double x = g.position(i);
    if (x <= 0.0) {
      EXPECT_EQ(u.values[i], 0.0);
    } else if (x < 0.9) {
      EXPECT_NEAR(u.values[i].real(), std::cos(c * std::log(x)), 1e-12);
      EXPECT_NEAR(u.values[i].imag(), std::sin(c * std::log(x)), 1e-12);
    }
  }
}

TEST(Sampling, DeltaHasUnitMass) {
  const auto g = grid(12);
  const auto u = rs::sample_model_solution({rs::ModelKind::delta}, g);
  double mass = 0.0;
  int nonzero = 0;
  for (const auto& v : u.values) {
    mass += v.real() * g.spacing();
    nonzero += v != 0.0;
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_EQ(nonzero, 1);
}

TEST(Sampling, Rejections) {
  const auto g = grid(10);
  EXPECT_THROW(rs::sample_model_solution(xplus(-2.0), g), rs::InvalidParameters);
  EXPECT_THROW(rs::sample_model_solution(xplus(-1.0 + 0.5i), g), rs::InvalidParameters);
  EXPECT_THROW(rs::model_from_string("cantor"), rs::InvalidParameters);
  EXPECT_THROW(rs::sample_model_solution({rs::ModelKind::heaviside}, g, {3.5, 1.0}), rs::InvalidParameters);
  auto odd = g;
  odd.points = 1000;
  EXPECT_THROW(rs::sample_model_solution({rs::ModelKind::heaviside}, odd), rs::InvalidParameters);
  EXPECT_EQ(rs::model_from_string("gaussian"), rs::ModelKind::gaussian);
}

TEST(Shells, PartitionOfUnity) {
  for (double xi : {3.0, 7.5, 100.0, 1234.5, 40000.0}) {
    double total = 0.0;
    for (int j = 0; j < 20; ++j) {
      const double w = rs::detail::shell_weight(xi, j);
      EXPECT_GE(w, 0.0);
      EXPECT_NEAR(w, oracle::shell(xi, j), 1e-14);
      total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-14) << xi;
  }
}

TEST(Shells, BandSafety) {
  const auto g = grid(20);
  const auto safe = rs::nyquist_safe_band(g);
  EXPECT_EQ(safe.lo, 1);
  EXPECT_EQ(safe.hi, 15);
  // Upper support edge 2^{hi + 3/2} stays a factor 4 below Nyquist.
  EXPECT_LE(std::exp2(safe.hi + 1.5) * 4.0, M_PI / g.spacing());
  EXPECT_GT(std::exp2(safe.hi + 2.5) * 4.0, M_PI / g.spacing());
  const auto u = rs::sample_model_solution({rs::ModelKind::heaviside}, grid(12));
  EXPECT_THROW(rs::dyadic_shell_energies(u, {1, 20}), rs::BandUnsafe);
  EXPECT_THROW(rs::dyadic_shell_energies(u, {-2, 5}), rs::BandUnsafe);
  EXPECT_EQ(rs::probe_band(g, {0.0, 1.0}).lo, 3);
  EXPECT_EQ(rs::probe_band(g, {0.0, 0.5}).lo, 4);
}

TEST(Shells, MatchClosedFormEnergies) {
  const auto g = grid(18);
  const rs::Window w{0.0, 1.0};
  const auto band = rs::probe_band(g, w);
  for (double a : {-0.25, 0.0, 0.25}) {
    const auto spec = rs::dyadic_shell_energies(rs::sample_model_solution(xplus(a), g, w), band);
    for (int j = band.lo + 3; j <= band.hi - 2; ++j) {
      const double expected = oracle::xplus_energy(a, j);
      EXPECT_NEAR(spec.at(j) / expected, 1.0, 0.02) << "a=" << a << " j=" << j;
    }
  }
  const auto delta = rs::dyadic_shell_energies(rs::sample_model_solution({rs::ModelKind::delta}, g, w), band);
  for (int j = band.lo; j <= band.hi; ++j) EXPECT_NEAR(delta.at(j) / oracle::delta_energy(j), 1.0, 1e-4) << j;
}

TEST(Shells, DyadicSlopes) {
  const auto cfg = config(18);
  auto slope = [&](rs::ModelKind k) { return rs::probe_model({k}, cfg).estimate.slope; };
  EXPECT_NEAR(slope(rs::ModelKind::heaviside), -1.0, 0.05);
  EXPECT_NEAR(slope(rs::ModelKind::delta), 1.0, 0.05);
  // Gaussian energies fall through the floating-point floor inside the fit band.
  const auto gauss = rs::probe_model({rs::ModelKind::gaussian}, cfg);
  EXPECT_TRUE(gauss.estimate.smooth);
  EXPECT_TRUE(gauss.estimate.beyond_cap);
  const auto& e = gauss.spectrum;
  EXPECT_LT(e.at(e.band.lo + 4), e.at(e.band.lo + 3) * std::exp2(-20.0));
}

TEST(Estimate, ExactPowerLaw) {
  const auto est = rs::estimate_critical_exponent(synthetic(0, 12, -1.0));
  EXPECT_NEAR(est.slope, -1.0, 1e-12);
  EXPECT_NEAR(est.s_star, 0.5, 1e-12);
  EXPECT_NEAR(est.residual, 0.0, 1e-12);
  EXPECT_EQ(est.fit_band.lo, 3);
  EXPECT_EQ(est.fit_band.hi, 10);
  EXPECT_FALSE(est.beyond_cap);
}

TEST(Estimate, CapsSteepSpectra) {
  const auto fast = rs::estimate_critical_exponent(synthetic(0, 12, -20.0));
  EXPECT_TRUE(fast.beyond_cap);
  EXPECT_TRUE(fast.smooth);
  EXPECT_DOUBLE_EQ(fast.s_star, 6.0);
  const auto rough = rs::estimate_critical_exponent(synthetic(0, 12, 14.0));
  EXPECT_TRUE(rough.beyond_cap);
  EXPECT_FALSE(rough.smooth);
  EXPECT_DOUBLE_EQ(rough.s_star, -6.0);
}

TEST(Estimate, DegenerateInputs) {
  auto zero = synthetic(0, 12, -1.0);
  std::fill(zero.energies.begin(), zero.energies.end(), 0.0);
  EXPECT_THROW(rs::estimate_critical_exponent(zero), rs::DegenerateFit);
  EXPECT_THROW(rs::estimate_critical_exponent(synthetic(0, 8, -1.0)), rs::DegenerateFit);  // 4 shells after trimming
  EXPECT_NO_THROW(rs::estimate_critical_exponent(synthetic(0, 9, -1.0)));
}

TEST(Calibration, HeavisideDeltaGaussian) {
  const auto cfg = config(18);
  const double h = s_star({rs::ModelKind::heaviside}, cfg);
  const double d = s_star({rs::ModelKind::delta}, cfg);
  EXPECT_NEAR(h, 0.5, 0.05);
  EXPECT_NEAR(d, -0.5, 0.05);
  EXPECT_NEAR(h - d, 1.0, 0.07);
}

TEST(Invariants, WindowHalving) {
  auto cfg = config(18);
  auto narrow = cfg;
  narrow.window.half_width /= 2.0;
  for (const auto& m : {rs::ModelSpec{rs::ModelKind::heaviside}, rs::ModelSpec{rs::ModelKind::delta}, xplus(-0.25),
                        xplus(0.25)}) {
    EXPECT_LT(std::fabs(s_star(m, cfg) - s_star(m, narrow)), 0.05) << rs::to_string(m.kind) << m.exponent;
  }
}

TEST(Invariants, GridRefinement) {
  const auto coarse = config(18), fine = config(19);
  for (const auto& m : {rs::ModelSpec{rs::ModelKind::heaviside}, rs::ModelSpec{rs::ModelKind::delta}, xplus(-0.25),
                        xplus(0.25)}) {
    EXPECT_LT(std::fabs(s_star(m, coarse) - s_star(m, fine)), 0.03) << rs::to_string(m.kind) << m.exponent;
  }
}

TEST(Invariants, MonotoneInImaginaryPart) {
  const auto cfg = config(18);
  double previous = INFINITY;
  for (double t : {-0.25, -0.125, 0.0, 0.125, 0.25}) {
    const double s = s_star(xplus(1i * (1i * t)), cfg);
    EXPECT_LT(s, previous) << t;
    EXPECT_NEAR(s, 0.5 - t, 0.05) << t;
    previous = s;
  }
}

TEST(Experiment, MatchesPredictedThresholds) {
  const auto table = rs::threshold_experiment({0.0, 0.25i, -0.25i}, config(18));
  ASSERT_EQ(table.rows.size(), 3u);
  const double expected[] = {0.5, 0.25, 0.75};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(table.rows[i].s0, expected[i], 1e-12);
    EXPECT_LT(table.rows[i].error, 0.1);
    EXPECT_LT(table.rows[i].offset_sensitivity, 0.05);
  }
  EXPECT_LT(table.max_error, 0.1);
}

TEST(Experiment, RealPartOnlyRotatesPhase) {
  const auto table = rs::threshold_experiment({0.25i, 0.3 + 0.25i}, config(17));
  EXPECT_NEAR(table.rows[0].s0, table.rows[1].s0, 1e-12);
  EXPECT_NEAR(table.rows[0].s_star, table.rows[1].s_star, 0.02);
}

TEST(Experiment, ParallelRowsAreDeterministic) {
  auto cfg = config(17);
  const auto serial = rs::threshold_experiment({0.0, 0.1i, -0.1i}, cfg);
  cfg.threads = 3;
  const auto parallel = rs::threshold_experiment({0.0, 0.1i, -0.1i}, cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(serial.rows[i].s_star, parallel.rows[i].s_star);
    EXPECT_EQ(serial.rows[i].spectrum.energies, parallel.rows[i].spectrum.energies);
  }
}

TEST(Experiment, RejectsNonIntegrableSolutions) {
  EXPECT_THROW(rs::threshold_experiment({0.5i}), rs::InvalidParameters);
  EXPECT_THROW(rs::threshold_experiment({-0.6i}), rs::InvalidParameters);
}
