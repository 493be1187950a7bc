#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "radialscope/symcore/compile.hpp"
#include "radialscope/symcore/expr.hpp"

namespace radialscope {

/// Axis-aligned box of named intervals; points are drawn uniformly inside it.
struct SampleBox {
  struct Range {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
  };
  std::vector<Range> ranges;

  SampleBox& add(std::string name, double lo, double hi) {
    ranges.push_back({std::move(name), lo, hi});
    return *this;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& r : ranges) out.push_back(r.name);
    return out;
  }

  /// `count` points, deterministic in `seed`.
  std::vector<std::vector<double>> draw(std::size_t count, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> pts(count, std::vector<double>(ranges.size()));
    for (auto& p : pts) {
      for (std::size_t k = 0; k < ranges.size(); ++k) {
        std::uniform_real_distribution<double> u(ranges[k].lo, ranges[k].hi);
        p[k] = u(rng);
      }
    }
    return pts;
  }
};

struct SampleComparison {
  bool equal = false;
  double max_residual = 0.0;
  std::vector<double> worst_point;
};

/// Compares two expressions at random points of `box`. The residual at a point is
/// |a - b| / max(1, |a|, |b|); the expressions agree when the largest residual is <= tol.
inline SampleComparison equal_on_samples(const SymExpr& a, const SymExpr& b, const SampleBox& box,
                                         std::size_t count = 100, std::uint64_t seed = 1,
                                         double tol = 1e-9) {
  const SymExpr outputs[] = {a, b};
  const CompiledExpr prog(outputs, box.names());
  std::vector<double> scratch;
  double out[2];
  SampleComparison result;
  for (const auto& p : box.draw(count, seed)) {
    prog.evaluate(p, out, scratch);
    if (!std::isfinite(out[0]) || !std::isfinite(out[1])) {
      throw EvaluationError("non-finite value while comparing expressions", p);
    }
    const double scale = std::max({1.0, std::fabs(out[0]), std::fabs(out[1])});
    const double r = std::fabs(out[0] - out[1]) / scale;
    if (r > result.max_residual || result.worst_point.empty()) {
      result.max_residual = std::max(result.max_residual, r);
      result.worst_point = p;
    }
  }
  result.equal = result.max_residual <= tol;
  return result;
}

}  // namespace radialscope
