#pragma once

// Exact samples of one-dimensional model distributions on a uniform grid, multiplied by a
// smooth window around the base point.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "radialscope/commutant/cutoffs.hpp"
#include "radialscope/errors.hpp"

namespace radialscope {

/// Grid x_i = -length/2 + (i + offset) h, h = length / points. With offset 0.5 and an even
/// point count the origin sits midway between two samples.
struct GridSpec {
  std::size_t points = std::size_t{1} << 20;
  double length = 8.0;
  double offset = 0.5;

  double spacing() const { return length / static_cast<double>(points); }
  double position(std::size_t i) const { return -length / 2.0 + (static_cast<double>(i) + offset) * spacing(); }

  void validate() const {
    if (points < 64 || (points & (points - 1)) != 0) throw InvalidParameters("grid point count must be a power of two >= 64");
    if (!(length > 0.0) || !std::isfinite(length)) throw InvalidParameters("grid length must be positive");
    if (!(offset >= 0.0 && offset < 1.0)) throw InvalidParameters("grid offset must lie in [0, 1)");
  }
};

/// Smooth bump equal to 1 on |x - center| <= flat * half_width and 0 beyond half_width.
struct Window {
  double center = 0.0;
  double half_width = 1.0;
  double flat = 0.5;

  double operator()(double x) const {
    return CutoffProfile::value(std::fabs(x - center), flat * half_width, half_width);
  }
};

enum class ModelKind { heaviside, xplus_power, delta, gaussian };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::heaviside: return "heaviside";
    case ModelKind::xplus_power: return "xplus_power";
    case ModelKind::delta: return "delta";
    default: return "gaussian";
  }
}

inline ModelKind model_from_string(const std::string& name) {
  if (name == "heaviside") return ModelKind::heaviside;
  if (name == "xplus_power") return ModelKind::xplus_power;
  if (name == "delta") return ModelKind::delta;
  if (name == "gaussian") return ModelKind::gaussian;
  throw InvalidParameters("unknown model '" + name + "'");
}

struct ModelSpec {
  ModelKind kind = ModelKind::heaviside;
  std::complex<double> exponent = 0.0;  // xplus_power: x_+^a
  double width = 0.1;                   // gaussian standard deviation
};

struct SampledDistribution {
  GridSpec grid;
  Window window;
  ModelSpec model;
  std::vector<std::complex<double>> values;  // windowed samples
};

/// Unwindowed value of the model at x (the delta is handled separately).
inline std::complex<double> model_value(const ModelSpec& m, double x) {
  switch (m.kind) {
    case ModelKind::heaviside:
      return x > 0.0 ? 1.0 : (x == 0.0 ? 0.5 : 0.0);
    case ModelKind::xplus_power:
      // x_+^a = exp(a log x); the grid-aligned sample at 0 is set to 0.
      return x > 0.0 ? std::exp(m.exponent * std::log(x)) : 0.0;
    case ModelKind::gaussian:
      return std::exp(-x * x / (2.0 * m.width * m.width));
    default:
      return 0.0;
  }
}

inline SampledDistribution sample_model_solution(const ModelSpec& model, const GridSpec& grid, const Window& window = {}) {
  grid.validate();
  if (model.kind == ModelKind::xplus_power && !(model.exponent.real() > -1.0)) {
    throw InvalidParameters("x_+^a needs Re a > -1 to be locally integrable");
  }
  if (model.kind == ModelKind::gaussian && !(model.width > 0.0)) throw InvalidParameters("gaussian width must be positive");
  if (!(window.half_width > 0.0)) throw InvalidParameters("window width must be positive");
  if (!(window.flat >= 0.0 && window.flat < 1.0)) throw InvalidParameters("window flat fraction must lie in [0, 1)");
  const double edge = grid.length / 2.0;
  if (!(window.center - window.half_width > -edge && window.center + window.half_width < edge)) {
    throw InvalidParameters("window support must lie strictly inside the grid");
  }

  SampledDistribution u{grid, window, model, std::vector<std::complex<double>>(grid.points, 0.0)};
  const double h = grid.spacing();
  if (model.kind == ModelKind::delta) {
    // Unit impulse of mass 1 at the sample nearest the origin.
    const double index = std::round(edge / h - grid.offset);
    const auto i = static_cast<std::size_t>(index);
    u.values[i] = window(grid.position(i)) / h;
    return u;
  }
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.position(i);
    const double w = window(x);
    if (w != 0.0) u.values[i] = w * model_value(model, x);
  }
  return u;
}

}  // namespace radialscope
