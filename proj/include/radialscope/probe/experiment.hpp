#pragma once

// Measured critical exponent of the exact solution x_+^{ic} of (x D_x - c) u = 0 against the
// predicted threshold s0(c).

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <vector>

#include "radialscope/geometry.hpp"
#include "radialscope/probe/spectrum.hpp"
#include "radialscope/threshold.hpp"

namespace radialscope {

/// x D_x - c on the line.
inline OperatorSpec dilation_operator(std::complex<double> c) {
  OperatorSpec op;
  op.chart = ChartSpec::standard(1);
  op.order = 1.0;
  op.terms = {ComplexSym(parse("x*xi", op.chart)), ComplexSym(-c.real(), -c.imag())};
  op.density = 1.0;
  return op;
}

struct ProbeConfig {
  GridSpec grid;
  Window window;
  double nyquist_margin = 4.0;
  EstimateOptions estimate;
  unsigned threads = 1;
};

struct ProbeRun {
  ShellSpectrum spectrum;
  RegularityEstimate estimate;
};

inline ProbeRun probe_model(const ModelSpec& model, const ProbeConfig& cfg) {
  const auto u = sample_model_solution(model, cfg.grid, cfg.window);
  ProbeRun run;
  run.spectrum = dyadic_shell_energies(u, probe_band(cfg.grid, cfg.window, cfg.nyquist_margin), cfg.nyquist_margin);
  run.estimate = estimate_critical_exponent(run.spectrum, cfg.estimate);
  return run;
}

struct ThresholdRow {
  std::complex<double> c;
  double s0 = 0.0;
  double s_star = 0.0;
  double error = 0.0;          // |s* - s0|
  double s_star_aligned = 0.0;  // jump on a grid point instead of mid-cell
  double offset_sensitivity = 0.0;
  RegularityEstimate estimate;
  ShellSpectrum spectrum;
};

struct ThresholdTable {
  std::vector<ThresholdRow> rows;
  double max_error = 0.0;
};

inline ThresholdRow threshold_row(std::complex<double> c, const ProbeConfig& cfg) {
  if (!(std::fabs(c.imag()) < 0.5)) throw InvalidParameters("x_+^{ic} needs |Im c| < 1/2");
  const OperatorSpec op = dilation_operator(c);
  const RadialChart chart = build_normal_coordinates(op.principal(), {op.chart, 1});
  ThresholdRow row;
  row.c = c;
  row.s0 = compute_thresholds(op, chart, std::vector<double>{}).s0;

  const ModelSpec model{ModelKind::xplus_power, std::complex<double>(0.0, 1.0) * c};
  const ProbeRun run = probe_model(model, cfg);
  row.spectrum = run.spectrum;
  row.estimate = run.estimate;
  row.s_star = run.estimate.s_star;
  row.error = std::fabs(row.s_star - row.s0);

  ProbeConfig aligned = cfg;
  aligned.grid.offset = 0.0;
  row.s_star_aligned = probe_model(model, aligned).estimate.s_star;
  row.offset_sensitivity = std::fabs(row.s_star_aligned - row.s_star);
  return row;
}

/// One row per c; rows are independent and run on up to cfg.threads workers.
inline ThresholdTable threshold_experiment(const std::vector<std::complex<double>>& cs, const ProbeConfig& cfg = {}) {
  for (const auto& c : cs) {
    if (!(std::fabs(c.imag()) < 0.5)) throw InvalidParameters("x_+^{ic} needs |Im c| < 1/2");
  }
  ThresholdTable table;
  table.rows.resize(cs.size());
  const std::size_t workers = std::max<unsigned>(1, cfg.threads);
  for (std::size_t start = 0; start < cs.size(); start += workers) {
    std::vector<std::future<ThresholdRow>> batch;
    for (std::size_t i = start; i < std::min(cs.size(), start + workers); ++i) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                 [&cfg, c = cs[i]] { return threshold_row(c, cfg); }));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) table.rows[start + k] = batch[k].get();
  }
  for (const auto& r : table.rows) table.max_error = std::max(table.max_error, r.error);
  return table;
}

}  // namespace radialscope
