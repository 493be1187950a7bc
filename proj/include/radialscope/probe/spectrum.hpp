#pragma once

// Littlewood-Paley shell energies of windowed samples and the critical Sobolev exponent read
// off their dyadic decay.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include "radialscope/probe/distribution.hpp"

namespace radialscope {

struct ShellBand {
  int lo = 1;
  int hi = 15;  // inclusive
};

struct ShellSpectrum {
  ShellBand band;
  std::vector<double> energies;  // energies[j - band.lo]

  double at(int j) const { return energies.at(static_cast<std::size_t>(j - band.lo)); }
};

namespace detail {

// FFTW planning is not thread-safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::vector<std::complex<double>> forward_dft(const std::vector<std::complex<double>>& in) {
  const int n = static_cast<int>(in.size());
  std::vector<std::complex<double>> out(in.size());
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, src, dst, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

// Edges of shell j sit at 2^j and 2^{j+1}; each transition spans a factor 2 centred on the edge.
inline double shell_step(double r) { return CutoffProfile::value(r, std::sqrt(0.5), std::sqrt(2.0)); }

inline double shell_weight(double xi, int j) {
  const double r = std::fabs(xi);
  return shell_step(r / std::ldexp(1.0, j + 1)) - shell_step(r / std::ldexp(1.0, j));
}

}  // namespace detail

/// Largest band whose shells stay below Nyquist / margin and above the frequency resolution.
inline ShellBand nyquist_safe_band(const GridSpec& grid, double margin = 4.0) {
  grid.validate();
  const double nyquist = M_PI / grid.spacing();
  const double resolution = 2.0 * M_PI / grid.length;
  ShellBand b;
  b.lo = static_cast<int>(std::ceil(std::log2(resolution) + 0.5));
  b.hi = static_cast<int>(std::floor(std::log2(nyquist / margin) - 1.5));
  if (b.hi < b.lo) throw BandUnsafe("grid resolves no dyadic shell");
  return b;
}

/// Nyquist-safe band whose lowest shell also clears the window's own frequency scale.
inline ShellBand probe_band(const GridSpec& grid, const Window& window, double margin = 4.0) {
  ShellBand b = nyquist_safe_band(grid, margin);
  b.lo = std::max(b.lo, static_cast<int>(std::ceil(std::log2(2.0 * M_PI / window.half_width))));
  if (b.hi < b.lo) throw BandUnsafe("window too narrow for the grid's shell band");
  return b;
}

inline void check_band(const GridSpec& grid, const ShellBand& band, double margin = 4.0) {
  const ShellBand safe = nyquist_safe_band(grid, margin);
  if (band.lo > band.hi) throw BandUnsafe("empty shell band");
  if (band.hi > safe.hi) throw BandUnsafe("shell " + std::to_string(band.hi) + " is within the Nyquist margin");
  if (band.lo < safe.lo) throw BandUnsafe("shell " + std::to_string(band.lo) + " is below the frequency resolution");
}

/// E_j = sum_k psi_j(xi_k) |u_hat(xi_k)|^2 dxi with a smooth partition psi_j.
inline ShellSpectrum dyadic_shell_energies(const SampledDistribution& u, const ShellBand& band, double margin = 4.0) {
  check_band(u.grid, band, margin);
  const auto spectrum = detail::forward_dft(u.values);
  const std::size_t n = u.values.size();
  const double h = u.grid.spacing();
  const double dxi = 2.0 * M_PI / u.grid.length;
  ShellSpectrum out{band, std::vector<double>(static_cast<std::size_t>(band.hi - band.lo + 1), 0.0)};
  const double lo_edge = std::ldexp(1.0, band.lo) * std::sqrt(0.5);
  const double hi_edge = std::ldexp(1.0, band.hi + 1) * std::sqrt(2.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double signed_k = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    const double xi = std::fabs(signed_k) * dxi;
    if (xi <= lo_edge || xi >= hi_edge) continue;
    const double power = std::norm(spectrum[k] * h) * dxi;
    // Only the two shells whose transition contains xi carry weight.
    const int j0 = static_cast<int>(std::floor(std::log2(xi) - 0.5));
    for (int j = std::max(band.lo, j0 - 1); j <= std::min(band.hi, j0 + 1); ++j) {
      const double w = detail::shell_weight(xi, j);
      if (w > 0.0) out.energies[static_cast<std::size_t>(j - band.lo)] += w * power;
    }
  }
  return out;
}

struct EstimateOptions {
  int drop_low = 3;
  int drop_high = 2;
  double cap = 6.0;
  double noise_floor = 1e-24;  // relative to the largest lower-shell energy
  std::size_t min_shells = 5;
};

struct RegularityEstimate {
  double s_star = 0.0;
  double slope = 0.0;     // d log2 E_j / dj
  double intercept = 0.0;
  double residual = 0.0;  // rms deviation of log2 E_j from the fit
  ShellBand fit_band;
  bool beyond_cap = false;
  bool smooth = false;  // energies reach the floating-point floor inside the fit band
};

inline RegularityEstimate estimate_critical_exponent(const ShellSpectrum& spec, const EstimateOptions& opt = {}) {
  RegularityEstimate est;
  est.fit_band = {spec.band.lo + opt.drop_low, spec.band.hi - opt.drop_high};
  const int count = est.fit_band.hi - est.fit_band.lo + 1;
  if (count < static_cast<int>(opt.min_shells)) {
    throw DegenerateFit("fit band has " + std::to_string(std::max(count, 0)) + " shells, fewer than " +
                        std::to_string(opt.min_shells));
  }
  double peak = 0.0;
  for (double e : spec.energies) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw DegenerateFit("shell energies must be finite and nonnegative");
    peak = std::max(peak, e);
  }
  if (peak == 0.0) throw DegenerateFit("all shell energies vanish");

  // The floor is relative to the largest energy at or below each shell, so rising spectra never hit it.
  double running = 0.0;
  for (int j = spec.band.lo; j < est.fit_band.lo; ++j) running = std::max(running, spec.at(j));
  for (int j = est.fit_band.lo; j <= est.fit_band.hi; ++j) {
    running = std::max(running, spec.at(j));
    if (spec.at(j) <= opt.noise_floor * running) {
      // Decay outruns double precision: faster than any power the fit could resolve.
      est.smooth = true;
      est.beyond_cap = true;
      est.s_star = opt.cap;
      return est;
    }
  }

  double mj = 0.0, ml = 0.0;
  for (int j = est.fit_band.lo; j <= est.fit_band.hi; ++j) {
    mj += j;
    ml += std::log2(spec.at(j));
  }
  mj /= count;
  ml /= count;
  double sjj = 0.0, sjl = 0.0;
  for (int j = est.fit_band.lo; j <= est.fit_band.hi; ++j) {
    sjj += (j - mj) * (j - mj);
    sjl += (j - mj) * (std::log2(spec.at(j)) - ml);
  }
  est.slope = sjl / sjj;
  est.intercept = ml - est.slope * mj;
  double ss = 0.0;
  for (int j = est.fit_band.lo; j <= est.fit_band.hi; ++j) {
    const double r = std::log2(spec.at(j)) - (est.intercept + est.slope * j);
    ss += r * r;
  }
  est.residual = std::sqrt(ss / count);
  est.s_star = -est.slope / 2.0;
  if (std::fabs(est.s_star) > opt.cap) {
    est.beyond_cap = true;
    est.smooth = est.s_star > 0.0;
    est.s_star = std::copysign(opt.cap, est.s_star);
  }
  return est;
}

}  // namespace radialscope
