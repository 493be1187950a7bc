#pragma once

// Polar blow-up of {alpha = 0} in (alpha, beta) space: alpha = r*omega with |omega| = 1.
// omega is kept as an embedded unit vector (two points when alpha is one-dimensional).
// A field V = V_alpha d_alpha + V_beta d_beta lifts to
//   r' = omega . V_alpha,  omega' = (V_alpha - omega (omega . V_alpha)) / r,  beta' = V_beta,
// and when V vanishes on {alpha = 0} with radial linear part the lift is r V_perp with
//   V_perp = (E_r / r, E_omega / r^2, E_beta / r).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "radialscope/symcore.hpp"

namespace radialscope {

struct BlowupChart {
  std::vector<std::string> alpha;
  std::vector<std::string> beta;
  std::vector<std::string> omega;
  std::string r = "r";

  BlowupChart() = default;
  BlowupChart(std::vector<std::string> alpha_names, std::vector<std::string> beta_names)
      : alpha(std::move(alpha_names)), beta(std::move(beta_names)) {
    if (alpha.empty()) throw InvalidParameters("blow-up needs at least one alpha direction");
    for (std::size_t i = 1; i <= alpha.size(); ++i) omega.push_back("w" + std::to_string(i));
  }

  /// a1.., b1.. with k directions each.
  static BlowupChart standard(std::size_t k) {
    std::vector<std::string> a, b;
    for (std::size_t i = 1; i <= k; ++i) {
      a.push_back("a" + std::to_string(i));
      b.push_back("b" + std::to_string(i));
    }
    return BlowupChart(std::move(a), std::move(b));
  }

  /// Field coordinates in the order alpha..., beta...
  std::vector<std::string> field_coordinates() const {
    std::vector<std::string> out = alpha;
    out.insert(out.end(), beta.begin(), beta.end());
    return out;
  }

  /// r, omega..., beta...
  std::vector<std::string> lifted_coordinates() const {
    std::vector<std::string> out = {r};
    out.insert(out.end(), omega.begin(), omega.end());
    out.insert(out.end(), beta.begin(), beta.end());
    return out;
  }

  /// Blowdown (r, omega, beta) -> (r omega, beta) as substitutions.
  std::map<std::string, SymExpr> blowdown() const {
    std::map<std::string, SymExpr> m;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      m[alpha[i]] = SymExpr::variable(r) * SymExpr::variable(omega[i]);
    }
    return m;
  }
};

struct BlowupOptions {
  std::size_t front_samples = 64;  // beta samples on the front face
  std::size_t directions = 16;     // omega samples when alpha has dimension >= 2
  std::uint64_t seed = 5;
  double beta_half_width = 0.5;
  double tol = 1e-10;
  double taylor_radius = 1e-3;  // below this r, V_perp is evaluated from its Taylor series
};

class BlowupLift {
 public:
  BlowupLift(const VectorFieldSym& field, BlowupChart chart, const BlowupOptions& opt = {})
      : chart_(std::move(chart)), opt_(opt) {
    const std::size_t k = chart_.alpha.size();
    const std::size_t nb = chart_.beta.size();
    if (field.size() != k + nb) throw InvalidParameters("field must have alpha and beta components");
    const auto down = chart_.blowdown();
    std::vector<SymExpr> va, vb;
    for (std::size_t i = 0; i < k; ++i) va.push_back(substitute(field[chart_.alpha[i]], down));
    for (std::size_t i = 0; i < nb; ++i) vb.push_back(substitute(field[chart_.beta[i]], down));
    SymExpr er = 0.0;
    for (std::size_t i = 0; i < k; ++i) er += SymExpr::variable(chart_.omega[i]) * va[i];
    lifted_.push_back(er);
    divisor_.push_back(1);
    for (std::size_t i = 0; i < k; ++i) {
      lifted_.push_back(va[i] - SymExpr::variable(chart_.omega[i]) * er);
      divisor_.push_back(2);
    }
    for (std::size_t i = 0; i < nb; ++i) {
      lifted_.push_back(vb[i]);
      divisor_.push_back(1);
    }

    // Taylor coefficients in r at r = 0, as functions of (omega, beta).
    const auto coords = chart_.lifted_coordinates();
    std::vector<SymExpr> coeffs;
    for (std::size_t c = 0; c < lifted_.size(); ++c) {
      SymExpr d = lifted_[c];
      double factorial = 1.0;
      for (int j = 0; j <= divisor_[c] + kTaylorTerms; ++j) {
        if (j > 0) factorial *= j;
        coeffs.push_back(substitute(d, chart_.r, 0.0) / factorial);
        d = differentiate(d, chart_.r);
      }
    }
    taylor_ = CompiledExpr(coeffs, coords);
    direct_ = CompiledExpr(lifted_, coords);
    check_front_face();
  }

  const BlowupChart& chart() const { return chart_; }

  /// E_r, E_omega..., E_beta... as expressions in (r, omega, beta).
  const std::vector<SymExpr>& lifted() const { return lifted_; }

  /// V_perp at (r, omega, beta); omega must be a unit vector.
  std::vector<double> vperp(double r, std::span<const double> omega, std::span<const double> beta) const {
    std::vector<double> point = {r};
    point.insert(point.end(), omega.begin(), omega.end());
    point.insert(point.end(), beta.begin(), beta.end());
    std::vector<double> out(lifted_.size());
    if (r >= opt_.taylor_radius) {
      const auto e = direct_.evaluate_all(point);
      for (std::size_t c = 0; c < e.size(); ++c) out[c] = e[c] / std::pow(r, divisor_[c]);
      return out;
    }
    const auto t = taylor_.evaluate_all(point);
    std::size_t idx = 0;
    for (std::size_t c = 0; c < lifted_.size(); ++c) {
      double sum = 0.0;
      double rp = 1.0;
      for (int j = 0; j <= divisor_[c] + kTaylorTerms; ++j, ++idx) {
        if (j >= divisor_[c]) {
          sum += t[idx] * rp;
          rp *= r;
        }
      }
      out[c] = sum;
    }
    return out;
  }

  /// Sampled unit directions and beta values on which front-face statistics are taken.
  const std::vector<std::vector<double>>& directions() const { return directions_; }
  const std::vector<std::vector<double>>& beta_samples() const { return betas_; }

  /// min / max of the r-component of V_perp over the front face samples.
  double front_radial_min() const { return front_min_; }
  double front_radial_max() const { return front_max_; }

  /// min over samples of sign * (r-component) for r in `radii` (including the front face).
  double radial_lower_bound(std::span<const double> radii, double sign) const {
    double lo = INFINITY;
    for (double r : radii) {
      for (const auto& w : directions_) {
        for (const auto& b : betas_) lo = std::min(lo, sign * vperp(r, w, b)[0]);
      }
    }
    return lo;
  }

 private:
  static constexpr int kTaylorTerms = 3;

  void check_front_face() {
    const std::size_t k = chart_.alpha.size();
    if (k == 1) {
      directions_ = {{1.0}, {-1.0}};
    } else {
      std::mt19937_64 rng(opt_.seed);
      std::normal_distribution<double> g;
      for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> e(k, 0.0);
        e[i] = 1.0;
        directions_.push_back(e);
      }
      while (directions_.size() < std::max(opt_.directions, k)) {
        std::vector<double> w(k);
        double norm = 0.0;
        for (auto& v : w) {
          v = g(rng);
          norm += v * v;
        }
        norm = std::sqrt(norm);
        for (auto& v : w) v /= norm;
        directions_.push_back(w);
      }
    }
    SampleBox box;
    for (const auto& b : chart_.beta) box.add(b, -opt_.beta_half_width, opt_.beta_half_width);
    betas_ = chart_.beta.empty() ? std::vector<std::vector<double>>{{}} : box.draw(opt_.front_samples, opt_.seed);

    front_min_ = INFINITY;
    front_max_ = -INFINITY;
    for (const auto& w : directions_) {
      for (const auto& b : betas_) {
        std::vector<double> point = {0.0};
        point.insert(point.end(), w.begin(), w.end());
        point.insert(point.end(), b.begin(), b.end());
        const auto t = taylor_.evaluate_all(point);
        std::size_t idx = 0;
        for (std::size_t c = 0; c < lifted_.size(); ++c) {
          for (int j = 0; j <= divisor_[c] + kTaylorTerms; ++j, ++idx) {
            if (j < divisor_[c] && !(std::fabs(t[idx]) <= opt_.tol)) {
              throw StructuralError(describe(c, j) + " does not vanish on the front face");
            }
          }
        }
        const double radial = vperp(0.0, w, b)[0];
        front_min_ = std::min(front_min_, radial);
        front_max_ = std::max(front_max_, radial);
      }
    }
  }

  std::string describe(std::size_t component, int order) const {
    const std::size_t k = chart_.alpha.size();
    std::string name;
    if (component == 0) {
      name = "r-component";
    } else if (component <= k) {
      name = chart_.omega[component - 1] + "-component";
    } else {
      name = chart_.beta[component - 1 - k] + "-component";
    }
    return order == 0 ? name : "order-" + std::to_string(order) + " term of the " + name;
  }

  BlowupChart chart_;
  BlowupOptions opt_;
  std::vector<SymExpr> lifted_;
  std::vector<int> divisor_;
  CompiledExpr taylor_;
  CompiledExpr direct_;
  std::vector<std::vector<double>> directions_;
  std::vector<std::vector<double>> betas_;
  double front_min_ = 0.0;
  double front_max_ = 0.0;
};

inline BlowupLift blowup_lift(const VectorFieldSym& field, const BlowupChart& chart, const BlowupOptions& opt = {}) {
  return BlowupLift(field, chart, opt);
}

}  // namespace radialscope
