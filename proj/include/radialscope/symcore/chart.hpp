#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "radialscope/symcore/calculus.hpp"
#include "radialscope/symcore/compile.hpp"
#include "radialscope/symcore/expr.hpp"
#include "radialscope/symcore/parse.hpp"
#include "radialscope/symcore/sampling.hpp"

namespace radialscope {

/// Coordinates on (a patch of) the cotangent bundle: base names, fiber names, and the
/// fiber variables that are declared positive on the working region.
struct ChartSpec {
  std::vector<std::string> base;
  std::vector<std::string> fiber;
  std::set<std::string> positive;

  ChartSpec() = default;
  ChartSpec(std::vector<std::string> base_names, std::vector<std::string> fiber_names,
            std::set<std::string> positive_names = {})
      : base(std::move(base_names)), fiber(std::move(fiber_names)), positive(std::move(positive_names)) {
    std::set<std::string> seen;
    for (const auto& v : coordinates()) {
      if (!seen.insert(v).second) throw InvalidParameters("duplicate coordinate name '" + v + "'");
    }
    for (const auto& v : positive) {
      if (std::find(fiber.begin(), fiber.end(), v) == fiber.end()) {
        throw InvalidParameters("positivity declared for non-fiber variable '" + v + "'");
      }
    }
  }

  /// 1-D chart (x; xi) and n-D chart (x1..xn; xi1..xin).
  static ChartSpec standard(std::size_t n) {
    if (n == 1) return ChartSpec({"x"}, {"xi"});
    std::vector<std::string> b, f;
    for (std::size_t i = 1; i <= n; ++i) {
      b.push_back("x" + std::to_string(i));
      f.push_back("xi" + std::to_string(i));
    }
    return ChartSpec(std::move(b), std::move(f));
  }

  bool canonical() const { return base.size() == fiber.size() && !base.empty(); }
  std::size_t dimension() const { return base.size(); }

  /// Base names followed by fiber names.
  std::vector<std::string> coordinates() const {
    std::vector<std::string> all = base;
    all.insert(all.end(), fiber.begin(), fiber.end());
    return all;
  }

  void require_canonical() const {
    if (!canonical()) throw NotCanonical("chart base and fiber lists must pair up");
  }

  bool is_fiber(const std::string& v) const { return std::find(fiber.begin(), fiber.end(), v) != fiber.end(); }
};

/// Parses with the chart's coordinates as the declared variables.
inline SymExpr parse(std::string_view text, const ChartSpec& chart,
                     const FunctionTable& functions = default_functions()) {
  const auto names = chart.coordinates();
  return parse(text, std::span<const std::string>(names), functions);
}

/// Vector field with one coefficient per chart coordinate (base first, then fiber).
struct VectorFieldSym {
  std::vector<std::string> coordinates;
  std::vector<SymExpr> coefficients;

  VectorFieldSym() = default;
  VectorFieldSym(std::vector<std::string> coords, std::vector<SymExpr> coeffs)
      : coordinates(std::move(coords)), coefficients(std::move(coeffs)) {
    if (coordinates.size() != coefficients.size()) {
      throw InvalidParameters("vector field needs one coefficient per coordinate");
    }
  }

  std::size_t size() const { return coefficients.size(); }

  const SymExpr& operator[](const std::string& coordinate) const {
    auto it = std::find(coordinates.begin(), coordinates.end(), coordinate);
    if (it == coordinates.end()) throw InvalidParameters("no coordinate '" + coordinate + "' in field");
    return coefficients[static_cast<std::size_t>(it - coordinates.begin())];
  }

  /// Derivative of f along the field.
  SymExpr apply(const SymExpr& f) const {
    SymExpr total = 0.0;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      if (coefficients[i].is_constant(0.0)) continue;
      const SymExpr d = differentiate(f, coordinates[i]);
      if (d.is_constant(0.0)) continue;
      total += coefficients[i] * d;
    }
    return total;
  }

  VectorFieldSym scaled(const SymExpr& factor) const {
    VectorFieldSym out = *this;
    for (auto& c : out.coefficients) c = factor * c;
    return out;
  }
};

/// H_p = sum dp/dxi_i d/dx_i - dp/dx_i d/dxi_i.
inline VectorFieldSym hamilton_field(const SymExpr& p, const ChartSpec& chart) {
  chart.require_canonical();
  std::vector<SymExpr> coeffs;
  for (const auto& f : chart.fiber) coeffs.push_back(differentiate(p, f));
  for (const auto& b : chart.base) coeffs.push_back(-differentiate(p, b));
  return VectorFieldSym(chart.coordinates(), std::move(coeffs));
}

/// {a, b} = sum da/dxi_i db/dx_i - da/dx_i db/dxi_i, so that H_a b = {a, b}.
inline SymExpr poisson_bracket(const SymExpr& a, const SymExpr& b, const ChartSpec& chart) {
  chart.require_canonical();
  SymExpr total = 0.0;
  for (std::size_t i = 0; i < chart.dimension(); ++i) {
    total += differentiate(a, chart.fiber[i]) * differentiate(b, chart.base[i]);
    total -= differentiate(a, chart.base[i]) * differentiate(b, chart.fiber[i]);
  }
  return total;
}

/// Default sampling region for a chart: base in [-1, 1], fibers in [0.5, 2]
/// (fibers kept away from zero so negative-degree symbols stay finite).
inline SampleBox default_box(const ChartSpec& chart) {
  SampleBox box;
  for (const auto& b : chart.base) box.add(b, -1.0, 1.0);
  for (const auto& f : chart.fiber) box.add(f, 0.5, 2.0);
  return box;
}

/// Degree k with sum xi_i de/dxi_i = k e, found on samples; k is snapped to the
/// nearest half-integer when within tolerance. The zero expression reports 0.
inline std::optional<double> homogeneity_degree(const SymExpr& e, const ChartSpec& chart,
                                                std::uint64_t seed = 7, double tol = 1e-9) {
  if (e.is_constant(0.0)) return 0.0;
  SymExpr euler = 0.0;
  for (const auto& f : chart.fiber) euler += SymExpr::variable(f) * differentiate(e, f);

  const SampleBox box = default_box(chart);
  const SymExpr outputs[] = {e, euler};
  const CompiledExpr prog(outputs, box.names());
  std::vector<double> scratch;
  double out[2];
  const auto pts = box.draw(64, seed);

  std::optional<double> degree;
  double largest = 0.0;
  for (const auto& p : pts) {
    prog.evaluate(p, out, scratch);
    if (!std::isfinite(out[0]) || !std::isfinite(out[1])) return std::nullopt;
    if (std::fabs(out[0]) > largest) {
      largest = std::fabs(out[0]);
      degree = out[1] / out[0];
    }
  }
  if (largest < 1e-300) {
    // Vanishes on every sample; treat like the zero expression.
    return 0.0;
  }
  const double halves = std::round(*degree * 2.0) / 2.0;
  if (std::fabs(halves - *degree) < 1e-7) degree = halves;

  for (const auto& p : pts) {
    prog.evaluate(p, out, scratch);
    const double scale = std::max({1.0, std::fabs(out[0]), std::fabs(out[1])});
    if (std::fabs(out[1] - *degree * out[0]) > tol * scale) return std::nullopt;
  }
  return degree;
}

inline bool is_homogeneous(const SymExpr& e, const ChartSpec& chart, double degree) {
  auto k = homogeneity_degree(e, chart);
  return k && std::fabs(*k - degree) < 1e-9;
}

}  // namespace radialscope
