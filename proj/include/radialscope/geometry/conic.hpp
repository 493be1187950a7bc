#pragma once

// Conic chart adapted to the conormal model N*{x_n = 0}:
//   y_i = x_i,  z = s x_n,  theta_i = xi_i / (s xi_n),  zeta = s xi_n,
// where s = +1 or -1 selects the fiber branch. The reflection (x_n, xi_n) -> (s x_n, s xi_n)
// is symplectic, so the negative branch reuses every positive-branch formula.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "radialscope/symcore.hpp"

namespace radialscope {

class ConicChart {
 public:
  ConicChart() = default;

  ConicChart(ChartSpec canonical, int branch = +1) : canonical_(std::move(canonical)), branch_(branch) {
    canonical_.require_canonical();
    if (branch_ != 1 && branch_ != -1) throw InvalidParameters("fiber branch must be +1 or -1");
    const std::size_t n = canonical_.dimension();
    for (std::size_t i = 1; i < n; ++i) {
      y_.push_back("y" + std::to_string(i));
      theta_.push_back("th" + std::to_string(i));
    }
    for (const auto& name : coordinates()) {
      for (const auto& c : canonical_.coordinates()) {
        if (name == c) throw InvalidParameters("canonical coordinate '" + c + "' collides with a conic name");
      }
    }
  }

  const ChartSpec& canonical() const { return canonical_; }
  int branch() const { return branch_; }
  std::size_t dimension() const { return canonical_.dimension(); }

  const std::vector<std::string>& y() const { return y_; }
  const std::vector<std::string>& theta() const { return theta_; }
  const std::string& z() const { return z_; }
  const std::string& zeta() const { return zeta_; }

  /// y..., z, theta..., zeta
  std::vector<std::string> coordinates() const {
    std::vector<std::string> out = y_;
    out.push_back(z_);
    out.insert(out.end(), theta_.begin(), theta_.end());
    out.push_back(zeta_);
    return out;
  }

  /// Degree-0 coordinates y..., z, theta...
  std::vector<std::string> base_coordinates() const {
    std::vector<std::string> out = y_;
    out.push_back(z_);
    out.insert(out.end(), theta_.begin(), theta_.end());
    return out;
  }

  /// Each conic coordinate as an expression in the canonical ones.
  std::map<std::string, SymExpr> forward_map() const {
    const std::size_t n = dimension();
    const double s = branch_;
    const SymExpr xn = SymExpr::variable(canonical_.base[n - 1]);
    const SymExpr xin = SymExpr::variable(canonical_.fiber[n - 1]);
    std::map<std::string, SymExpr> m;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      m[y_[i]] = SymExpr::variable(canonical_.base[i]);
      m[theta_[i]] = SymExpr::variable(canonical_.fiber[i]) / (s * xin);
    }
    m[z_] = s * xn;
    m[zeta_] = s * xin;
    return m;
  }

  /// Each canonical coordinate as an expression in the conic ones.
  std::map<std::string, SymExpr> inverse_map() const {
    const std::size_t n = dimension();
    const double s = branch_;
    const SymExpr zeta = SymExpr::variable(zeta_);
    std::map<std::string, SymExpr> m;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      m[canonical_.base[i]] = SymExpr::variable(y_[i]);
      m[canonical_.fiber[i]] = SymExpr::variable(theta_[i]) * zeta;
    }
    m[canonical_.base[n - 1]] = s * SymExpr::variable(z_);
    m[canonical_.fiber[n - 1]] = s * zeta;
    return m;
  }

  /// Function in canonical coordinates, rewritten in conic ones.
  SymExpr to_conic(const SymExpr& e) const { return substitute(e, inverse_map()); }
  SymExpr to_canonical(const SymExpr& e) const { return substitute(e, forward_map()); }

  /// (x, xi) -> (y, z, theta, zeta); the point must lie on the declared branch.
  std::vector<double> point_to_conic(std::span<const double> p) const {
    const std::size_t n = dimension();
    if (p.size() != 2 * n) throw InvalidParameters("point has the wrong dimension");
    const double s = branch_;
    const double zeta = s * p[2 * n - 1];
    if (!(zeta > 0.0)) {
      throw PreconditionError("point lies off the fiber branch (s*xi_n <= 0)");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < n; ++i) out.push_back(p[i]);
    out.push_back(s * p[n - 1]);
    for (std::size_t i = 0; i + 1 < n; ++i) out.push_back(p[n + i] / zeta);
    out.push_back(zeta);
    return out;
  }

  std::vector<double> point_to_canonical(std::span<const double> w) const {
    const std::size_t n = dimension();
    if (w.size() != 2 * n) throw InvalidParameters("point has the wrong dimension");
    const double s = branch_;
    const double zeta = w[2 * n - 1];
    std::vector<double> out(2 * n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      out[i] = w[i];
      out[n + i] = w[n + i] * zeta;
    }
    out[n - 1] = s * w[n - 1];
    out[2 * n - 1] = s * zeta;
    return out;
  }

  /// Rejects sampling regions in which s*xi_n reaches zero.
  void require_on_branch(const SampleBox& box) const {
    const std::string& xin = canonical_.fiber.back();
    for (const auto& r : box.ranges) {
      if (r.name != xin) continue;
      const double lo = branch_ > 0 ? r.lo : -r.hi;
      if (!(lo > 0.0)) throw PreconditionError("region touches s*" + xin + " <= 0");
    }
  }

  /// Chain-rule pushforward of a field on canonical coordinates.
  VectorFieldSym pushforward(const VectorFieldSym& field) const {
    const auto fwd = forward_map();
    std::vector<SymExpr> coeffs;
    for (const auto& name : coordinates()) coeffs.push_back(to_conic(field.apply(fwd.at(name))));
    return VectorFieldSym(coordinates(), std::move(coeffs));
  }

 private:
  ChartSpec canonical_;
  int branch_ = 1;
  std::vector<std::string> y_;
  std::vector<std::string> theta_;
  std::string z_ = "z";
  std::string zeta_ = "zeta";
};

/// Hamilton field of a symbol already written in conic coordinates:
///   (1/zeta) d_theta_i p d_y_i + (d_zeta p - (1/zeta) sum theta_i d_theta_i p) d_z
///   + (1/zeta)(theta_i d_z p - d_y_i p) d_theta_i - (d_z p) d_zeta.
inline VectorFieldSym conic_hamilton_field(const SymExpr& p, const ConicChart& chart) {
  const SymExpr zeta = SymExpr::variable(chart.zeta());
  const SymExpr dz = differentiate(p, chart.z());
  const std::size_t k = chart.y().size();
  std::vector<SymExpr> dth(k);
  SymExpr euler = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    dth[i] = differentiate(p, chart.theta()[i]);
    euler += SymExpr::variable(chart.theta()[i]) * dth[i];
  }
  std::vector<SymExpr> coeffs;
  for (std::size_t i = 0; i < k; ++i) coeffs.push_back(dth[i] / zeta);
  coeffs.push_back(differentiate(p, chart.zeta()) - euler / zeta);
  for (std::size_t i = 0; i < k; ++i) {
    coeffs.push_back((SymExpr::variable(chart.theta()[i]) * dz - differentiate(p, chart.y()[i])) / zeta);
  }
  coeffs.push_back(-dz);
  return VectorFieldSym(chart.coordinates(), std::move(coeffs));
}

/// Sampling box over conic coordinates: y, z, theta in [c - h, c + h], zeta in [zlo, zhi].
inline SampleBox conic_box(const ConicChart& chart, double half_width = 1.0, double zeta_lo = 0.5,
                           double zeta_hi = 2.0) {
  SampleBox box;
  for (const auto& v : chart.y()) box.add(v, -half_width, half_width);
  box.add(chart.z(), -half_width, half_width);
  for (const auto& v : chart.theta()) box.add(v, -half_width, half_width);
  box.add(chart.zeta(), zeta_lo, zeta_hi);
  return box;
}

}  // namespace radialscope
