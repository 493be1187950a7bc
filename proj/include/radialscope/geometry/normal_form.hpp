#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "radialscope/geometry/conic.hpp"
#include "radialscope/symcore.hpp"

namespace radialscope {

/// The model Lagrangian N*{x_n = 0} on one fiber branch of a canonical chart.
struct LagrangianSpec {
  ChartSpec chart;
  int branch = +1;
};

/// z = f(args) solving F(args, z) = 0 near z = 0, by safeguarded Newton iteration.
/// Derivatives follow the implicit function theorem: df/dv = -(dF/dv)/(dF/dz) at z = f.
class ImplicitRoot final : public SpecialFunction, public std::enable_shared_from_this<ImplicitRoot> {
 public:
  static std::shared_ptr<const ImplicitRoot> make(SymExpr equation, std::vector<std::string> arguments,
                                                  std::string unknown, double tol = 1e-12) {
    return std::shared_ptr<const ImplicitRoot>(
        new ImplicitRoot(std::move(equation), std::move(arguments), std::move(unknown), tol));
  }

  const std::string& name() const override { return name_; }
  std::size_t arity() const override { return arguments_.size(); }

  double evaluate(std::span<const double> args) const override {
    std::vector<double> point(args.begin(), args.end());
    point.push_back(0.0);
    double& z = point.back();
    std::vector<double> scratch;
    double out[2];
    auto residual = [&](double at) {
      z = at;
      program_.evaluate(point, out, scratch);
      return out[0];
    };
    double fz = residual(0.0);
    for (int iter = 0; iter < 100; ++iter) {
      if (fz == 0.0) return z;
      const double slope = out[1];
      if (slope == 0.0 || !std::isfinite(slope)) return std::nan("");
      double step = fz / slope;
      const double from = z;
      double next = residual(from - step);
      int halvings = 0;
      while (!(std::fabs(next) < std::fabs(fz)) && halvings < 40) {
        step *= 0.5;
        next = residual(from - step);
        ++halvings;
      }
      fz = next;
      if (std::fabs(step) <= tol_ * std::max(1.0, std::fabs(z))) {
        return z;
      }
    }
    return std::nan("");
  }

  SymExpr partial(std::size_t index, std::span<const SymExpr> args) const override {
    std::map<std::string, SymExpr> at;
    for (std::size_t i = 0; i < arguments_.size(); ++i) at[arguments_[i]] = args[i];
    at[unknown_] = SymExpr::apply(shared_from_this(), std::vector<SymExpr>(args.begin(), args.end()));
    return -substitute(argument_slopes_[index], at) / substitute(unknown_slope_, at);
  }

  const SymExpr& equation() const { return equation_; }

 private:
  ImplicitRoot(SymExpr equation, std::vector<std::string> arguments, std::string unknown, double tol)
      : equation_(std::move(equation)), arguments_(std::move(arguments)), unknown_(std::move(unknown)), tol_(tol) {
    unknown_slope_ = differentiate(equation_, unknown_);
    for (const auto& a : arguments_) argument_slopes_.push_back(differentiate(equation_, a));
    std::vector<std::string> order = arguments_;
    order.push_back(unknown_);
    const SymExpr outputs[] = {equation_, unknown_slope_};
    program_ = CompiledExpr(outputs, order);
  }

  std::string name_ = "zroot";
  SymExpr equation_;
  std::vector<std::string> arguments_;
  std::string unknown_;
  double tol_;
  SymExpr unknown_slope_;
  std::vector<SymExpr> argument_slopes_;
  CompiledExpr program_;
};

/// Normal coordinates near the radial set: eta0 = p/zeta^m, alpha = theta, the corrected
/// beta, the fiber scale zeta and lambda = -H_p zeta. Every expression is written in the
/// conic coordinates of `conic`.
struct RadialChart {
  ConicChart conic;
  SymExpr principal;  // p in conic coordinates
  double order = 1.0;
  SymExpr zeta;
  SymExpr lambda;
  SymExpr eta0;
  std::vector<SymExpr> alpha;
  std::vector<SymExpr> beta;
  SymExpr root;  // z on the characteristic set at zeta = 1, a function of (y, theta)
  bool closed_form_root = true;

  VectorFieldSym field() const { return conic_hamilton_field(principal, conic); }

  /// Representative of the point q = (y_q) of the radial set: (y_q, z = 0, theta = 0, zeta = 1).
  std::vector<double> representative(std::span<const double> y_q) const {
    const std::size_t k = conic.y().size();
    if (y_q.size() != k) throw InvalidParameters("base point needs " + std::to_string(k) + " coordinate(s)");
    std::vector<double> w(y_q.begin(), y_q.end());
    w.push_back(0.0);
    w.insert(w.end(), k, 0.0);
    w.push_back(1.0);
    return w;
  }
};

struct NormalFormOptions {
  double tol = 1e-9;
  std::size_t samples = 32;
  std::uint64_t seed = 1;
  double half_width = 1.0;  // y range on the radial set
  bool check_nondegenerate = true;
};

namespace detail {

inline std::vector<std::vector<double>> lagrangian_samples(const ConicChart& chart, const NormalFormOptions& opt) {
  SampleBox box;
  for (const auto& v : chart.y()) box.add(v, -opt.half_width, opt.half_width);
  box.add(chart.zeta(), 0.5, 2.0);
  std::vector<std::vector<double>> out;
  const std::size_t k = chart.y().size();
  for (const auto& s : box.draw(opt.samples, opt.seed)) {
    std::vector<double> w(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k));
    w.push_back(0.0);
    w.insert(w.end(), k, 0.0);
    w.push_back(s.back());
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace detail

/// Builds the normal coordinates for a homogeneous principal symbol p given in the
/// canonical coordinates of `lag.chart`.
inline RadialChart build_normal_coordinates(const SymExpr& p, const LagrangianSpec& lag,
                                            const NormalFormOptions& opt = {}) {
  RadialChart rc;
  rc.conic = ConicChart(lag.chart, lag.branch);
  const ConicChart& cc = rc.conic;
  const auto degree = homogeneity_degree(p, lag.chart);
  if (!degree) throw PreconditionError("principal symbol is not homogeneous in the fiber variables");
  rc.order = *degree;
  rc.principal = cc.to_conic(p);

  const SymExpr zeta = SymExpr::variable(cc.zeta());
  const SymExpr dz = differentiate(rc.principal, cc.z());
  std::vector<SymExpr> checks = {rc.principal, dz};
  for (const auto& t : cc.theta()) checks.push_back(differentiate(rc.principal, t));
  const CompiledExpr prog(checks, cc.coordinates());
  std::vector<double> scratch;
  std::vector<double> out(checks.size());
  for (const auto& w : detail::lagrangian_samples(cc, opt)) {
    prog.evaluate(w, out, scratch);
    const double scale = std::max(1.0, std::pow(w.back(), rc.order));
    if (!(std::fabs(out[0]) <= opt.tol * scale)) {
      throw PreconditionError("principal symbol does not vanish on the Lagrangian");
    }
    for (std::size_t i = 2; i < out.size(); ++i) {
      if (!(std::fabs(out[i]) <= opt.tol * scale)) {
        throw PreconditionError("Hamilton field is not radial on the Lagrangian");
      }
    }
    if (opt.check_nondegenerate && !(std::fabs(out[1]) > opt.tol * scale)) {
      throw DegeneracyError("d_z p vanishes on the Lagrangian (dp = 0 there)");
    }
  }

  rc.zeta = zeta;
  rc.lambda = dz;
  rc.eta0 = rc.principal / pow(zeta, SymExpr(rc.order));
  for (const auto& t : cc.theta()) rc.alpha.push_back(SymExpr::variable(t));

  // Characteristic set at zeta = 1 as a graph z = f(y, theta).
  const SymExpr p1 = substitute(rc.principal, cc.zeta(), 1.0);
  const SymExpr p1z = differentiate(p1, cc.z());
  SampleBox box;
  for (const auto& v : cc.base_coordinates()) box.add(v, -opt.half_width, opt.half_width);
  const bool affine = equal_on_samples(differentiate(p1z, cc.z()), 0.0, box, 64, opt.seed, 1e-12).equal;
  std::vector<std::string> args = cc.y();
  args.insert(args.end(), cc.theta().begin(), cc.theta().end());
  if (affine) {
    rc.root = -substitute(p1, cc.z(), 0.0) / substitute(p1z, cc.z(), 0.0);
    rc.closed_form_root = true;
  } else {
    auto fn = ImplicitRoot::make(p1, args, cc.z());
    std::vector<SymExpr> vars;
    for (const auto& a : args) vars.push_back(SymExpr::variable(a));
    rc.root = SymExpr::apply(fn, std::move(vars));
    rc.closed_form_root = false;
  }

  for (std::size_t i = 0; i < cc.y().size(); ++i) {
    const SymExpr ratio = differentiate(p1, cc.theta()[i]) / p1z;
    rc.beta.push_back(SymExpr::variable(cc.y()[i]) - substitute(ratio, cc.z(), rc.root));
  }
  return rc;
}

/// Replaces the fiber scale by g*zeta for a positive degree-0 function g of (y, z, theta);
/// lambda and eta0 are recomputed from the new scale.
inline RadialChart rescale_zeta(const RadialChart& chart, const SymExpr& g) {
  for (const auto& v : free_variables(g)) {
    if (v == chart.conic.zeta()) throw InvalidParameters("rescaling factor must be homogeneous of degree 0");
  }
  RadialChart out = chart;
  out.zeta = g * chart.zeta;
  out.lambda = -chart.field().apply(out.zeta);
  out.eta0 = chart.principal / pow(out.zeta, SymExpr(chart.order));
  return out;
}

struct EigenRelation {
  std::string name;
  double max_value = 0.0;
  double max_derivative = 0.0;
};

struct EigenReport {
  bool passed = true;
  double max_residual = 0.0;
  std::vector<EigenRelation> relations;
  std::string first_violation;
  std::vector<double> witness;  // y coordinates of the first violating sample
};

struct EigenOptions {
  double tol = 1e-9;
  std::size_t samples = 50;
  std::uint64_t seed = 3;
  double half_width = 1.0;
};

/// Checks, at sampled points of the radial set, that on the characteristic set
/// H_p alpha_i - (lambda/zeta) alpha_i, H_p beta_i and H_p eta0 vanish together with
/// their first derivatives in theta (membership in the square of the ideal of the set).
inline EigenReport verify_eigen_relations(const RadialChart& chart, const EigenOptions& opt = {}) {
  const ConicChart& cc = chart.conic;
  const VectorFieldSym hp = chart.field();
  std::vector<std::pair<std::string, SymExpr>> residuals;
  for (std::size_t i = 0; i < chart.alpha.size(); ++i) {
    residuals.emplace_back("alpha_" + std::to_string(i + 1),
                           hp.apply(chart.alpha[i]) - chart.lambda / chart.zeta * chart.alpha[i]);
  }
  for (std::size_t i = 0; i < chart.beta.size(); ++i) {
    residuals.emplace_back("beta_" + std::to_string(i + 1), hp.apply(chart.beta[i]));
  }
  residuals.emplace_back("eta0", hp.apply(chart.eta0));

  const std::map<std::string, SymExpr> on_sigma = {{cc.z(), chart.root}, {cc.zeta(), SymExpr(1.0)}};
  std::vector<std::string> vars = cc.y();
  vars.insert(vars.end(), cc.theta().begin(), cc.theta().end());
  const std::size_t per = 1 + cc.theta().size();
  std::vector<SymExpr> outputs;
  for (const auto& [name, r] : residuals) {
    const SymExpr restricted = substitute(r, on_sigma);
    outputs.push_back(restricted);
    for (const auto& t : cc.theta()) outputs.push_back(differentiate(restricted, t));
  }
  const CompiledExpr prog(outputs, vars);

  EigenReport report;
  for (const auto& [name, r] : residuals) report.relations.push_back({name, 0.0, 0.0});
  SampleBox box;
  for (const auto& v : cc.y()) box.add(v, -opt.half_width, opt.half_width);
  std::vector<double> scratch;
  std::vector<double> out(outputs.size());
  const std::size_t count = cc.y().empty() ? 1 : opt.samples;
  for (const auto& ys : box.draw(count, opt.seed)) {
    std::vector<double> point = ys;
    point.insert(point.end(), cc.theta().size(), 0.0);
    prog.evaluate(point, out, scratch);
    for (std::size_t k = 0; k < residuals.size(); ++k) {
      auto& rel = report.relations[k];
      const double v = std::fabs(out[k * per]);
      double d = 0.0;
      for (std::size_t j = 1; j < per; ++j) d = std::max(d, std::fabs(out[k * per + j]));
      const bool bad_value = !(v <= opt.tol);
      const bool bad_derivative = !(d <= opt.tol);
      rel.max_value = std::max(rel.max_value, std::isfinite(v) ? v : INFINITY);
      rel.max_derivative = std::max(rel.max_derivative, std::isfinite(d) ? d : INFINITY);
      if ((bad_value || bad_derivative) && report.passed) {
        report.passed = false;
        report.first_violation = rel.name;
        report.witness = ys;
      }
    }
  }
  for (const auto& rel : report.relations) {
    report.max_residual = std::max({report.max_residual, rel.max_value, rel.max_derivative});
  }
  return report;
}

/// |d_xi p| + |d_x p - ((d_x p . xi)/|xi|^2) xi| at a point of a canonical chart;
/// zero exactly where H_p is a multiple of the fiber dilation field.
inline double radiality_residual(const SymExpr& p, const ChartSpec& chart, std::span<const double> point) {
  chart.require_canonical();
  const std::size_t n = chart.dimension();
  if (point.size() != 2 * n) throw InvalidParameters("point has the wrong dimension");
  std::vector<SymExpr> grads;
  for (const auto& v : chart.base) grads.push_back(differentiate(p, v));
  for (const auto& v : chart.fiber) grads.push_back(differentiate(p, v));
  const auto g = CompiledExpr(grads, chart.coordinates()).evaluate_all(point);
  double xi2 = 0.0, dot = 0.0, fiber_part = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xi2 += point[n + i] * point[n + i];
    dot += g[i] * point[n + i];
    fiber_part += g[n + i] * g[n + i];
  }
  if (xi2 == 0.0) throw PreconditionError("radiality is undefined on the zero section");
  double normal_part = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = g[i] - dot / xi2 * point[n + i];
    normal_part += c * c;
  }
  return std::sqrt(fiber_part) + std::sqrt(normal_part);
}

enum class RadialKind { sink, source };

inline const char* to_string(RadialKind k) { return k == RadialKind::sink ? "sink" : "source"; }

struct Classification {
  RadialKind kind = RadialKind::source;
  double lambda0 = 0.0;
};

/// lambda0 = lambda / zeta^m at a representative of q; negative means sink.
inline Classification sink_source_classify(const RadialChart& chart, std::span<const double> y_q,
                                           double tol = 1e-9) {
  const SymExpr lambda0 = chart.lambda / pow(chart.zeta, SymExpr(chart.order));
  const double value = evaluate(lambda0, chart.conic.coordinates(), chart.representative(y_q));
  if (!std::isfinite(value) || std::fabs(value) < tol) {
    throw DegeneracyError("degenerate radial point: lambda0 = " + std::to_string(value));
  }
  return {value < 0.0 ? RadialKind::sink : RadialKind::source, value};
}

/// W_p = zeta^{1-m} H_p on the characteristic set at a cosphere point given in (alpha, beta);
/// returns (d alpha/dt, d beta/dt). y is recovered from beta by Newton iteration.
class CosphereField {
 public:
  explicit CosphereField(const RadialChart& chart) : chart_(chart) {
    const ConicChart& cc = chart.conic;
    vars_ = cc.y();
    vars_.insert(vars_.end(), cc.theta().begin(), cc.theta().end());
    const std::map<std::string, SymExpr> on_sigma = {{cc.z(), chart.root}, {cc.zeta(), SymExpr(1.0)}};
    const VectorFieldSym hp = chart.field();
    std::vector<SymExpr> rates;
    for (const auto& a : chart.alpha) rates.push_back(substitute(hp.apply(a), on_sigma));
    for (const auto& b : chart.beta) rates.push_back(substitute(hp.apply(b), on_sigma));
    rates_ = CompiledExpr(rates, vars_);
    std::vector<SymExpr> inv;
    for (const auto& b : chart.beta) inv.push_back(b);
    for (const auto& b : chart.beta) {
      for (const auto& y : cc.y()) inv.push_back(differentiate(b, y));
    }
    beta_ = CompiledExpr(inv, vars_);
  }

  /// y with beta(y, alpha) = target.
  std::vector<double> solve_y(std::span<const double> alpha, std::span<const double> target) const {
    const std::size_t k = alpha.size();
    std::vector<double> point(target.begin(), target.end());
    point.insert(point.end(), alpha.begin(), alpha.end());
    std::vector<double> scratch, out(k + k * k);
    for (int iter = 0; iter < 60; ++iter) {
      beta_.evaluate(point, out, scratch);
      // Solve J dy = beta - target by Gaussian elimination with partial pivoting.
      std::vector<double> a(k * k), rhs(k);
      double err = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        rhs[i] = out[i] - target[i];
        err = std::max(err, std::fabs(rhs[i]));
        for (std::size_t j = 0; j < k; ++j) a[i * k + j] = out[k + i * k + j];
      }
      if (err < 1e-14) break;
      for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r) {
          if (std::fabs(a[r * k + c]) > std::fabs(a[piv * k + c])) piv = r;
        }
        if (a[piv * k + c] == 0.0) throw DegeneracyError("beta is not invertible in y at this point");
        if (piv != c) {
          for (std::size_t j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
          std::swap(rhs[c], rhs[piv]);
        }
        for (std::size_t r = c + 1; r < k; ++r) {
          const double f = a[r * k + c] / a[c * k + c];
          for (std::size_t j = c; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
          rhs[r] -= f * rhs[c];
        }
      }
      for (std::size_t c = k; c-- > 0;) {
        double s = rhs[c];
        for (std::size_t j = c + 1; j < k; ++j) s -= a[c * k + j] * rhs[j];
        rhs[c] = s / a[c * k + c];
      }
      for (std::size_t i = 0; i < k; ++i) point[i] -= rhs[i];
    }
    return std::vector<double>(point.begin(), point.begin() + static_cast<std::ptrdiff_t>(k));
  }

  std::pair<std::vector<double>, std::vector<double>> operator()(std::span<const double> alpha,
                                                                 std::span<const double> beta) const {
    const std::size_t k = alpha.size();
    std::vector<double> point = solve_y(alpha, beta);
    point.insert(point.end(), alpha.begin(), alpha.end());
    const auto r = rates_.evaluate_all(point);
    return {std::vector<double>(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k)),
            std::vector<double>(r.begin() + static_cast<std::ptrdiff_t>(k), r.end())};
  }

 private:
  RadialChart chart_;
  std::vector<std::string> vars_;
  CompiledExpr rates_;
  CompiledExpr beta_;
};

}  // namespace radialscope
