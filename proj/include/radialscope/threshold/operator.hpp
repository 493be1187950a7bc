#pragma once

// Full left symbols of differential-type operators, their formal adjoints and the
// subprincipal difference. Convention: left quantization with D = -i d/dx, so
//   Op(a) u(x) = (2 pi)^-n int e^{i x.xi} a(x, xi) u^(xi) dxi.

#include <cmath>
#include <string>
#include <vector>

#include "radialscope/symcore.hpp"

namespace radialscope {

/// re + i im with real-valued expression parts.
struct ComplexSym {
  SymExpr re = 0.0;
  SymExpr im = 0.0;

  ComplexSym() = default;
  ComplexSym(SymExpr real, SymExpr imag = 0.0) : re(std::move(real)), im(std::move(imag)) {}

  ComplexSym conj() const { return {re, -im}; }
  /// Multiplication by (-i)^k.
  ComplexSym times_minus_i_power(int k) const {
    switch (((k % 4) + 4) % 4) {
      case 0: return *this;
      case 1: return {im, -re};
      case 2: return {-re, -im};
      default: return {-im, re};
    }
  }
  ComplexSym scaled(const SymExpr& factor) const { return {factor * re, factor * im}; }
  ComplexSym derivative(const std::string& v) const { return {differentiate(re, v), differentiate(im, v)}; }
  bool is_zero() const { return re.is_constant(0.0) && im.is_constant(0.0); }
};

inline ComplexSym operator+(const ComplexSym& a, const ComplexSym& b) { return {a.re + b.re, a.im + b.im}; }
inline ComplexSym operator-(const ComplexSym& a, const ComplexSym& b) { return {a.re - b.re, a.im - b.im}; }

/// P with left symbol p_m + p_{m-1} + ... in the canonical chart and a positive density on the base.
struct OperatorSpec {
  ChartSpec chart;
  double order = 1.0;
  std::vector<ComplexSym> terms;  // terms[j] carries order m - j
  SymExpr density = 1.0;

  const SymExpr& principal() const { return terms.at(0).re; }

  /// Symbol term of order m - j (zero when absent).
  ComplexSym term(std::size_t j) const { return j < terms.size() ? terms[j] : ComplexSym{}; }

  void validate() const {
    chart.require_canonical();
    if (terms.empty()) throw InvalidParameters("operator needs a principal symbol");
    const auto degree = homogeneity_degree(principal(), chart);
    if (!degree || std::fabs(*degree - order) > 1e-9) {
      throw InvalidParameters("principal symbol is not homogeneous of the declared order");
    }
    if (!equal_on_samples(terms[0].im, 0.0, default_box(chart), 32, 1, 1e-14).equal) {
      throw InvalidParameters("principal symbol must be real");
    }
    for (const auto& v : free_variables(density)) {
      if (chart.is_fiber(v)) throw InvalidParameters("density may depend on base variables only");
    }
    SampleBox box = default_box(chart);
    for (const auto& p : box.draw(32, 2)) {
      if (!(evaluate(density, box.names(), p) > 0.0)) throw InvalidParameters("density must be positive");
    }
  }
};

namespace detail {

/// Multi-indices in n variables with |a| <= max_order, each with its factorial a!.
inline void multi_indices(std::size_t n, int max_order, std::vector<std::vector<int>>& out) {
  std::vector<int> current(n, 0);
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos == n) {
      out.push_back(current);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      current[pos] = k;
      self(self, pos + 1, left - k);
    }
    current[pos] = 0;
  };
  rec(rec, 0, max_order);
}

inline double factorial(const std::vector<int>& a) {
  double f = 1.0;
  for (int k : a) {
    for (int j = 2; j <= k; ++j) f *= j;
  }
  return f;
}

inline int total(const std::vector<int>& a) {
  int t = 0;
  for (int k : a) t += k;
  return t;
}

template <typename Sym>
Sym derive(Sym e, const std::vector<std::string>& vars, const std::vector<int>& index) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (int k = 0; k < index[i]; ++k) e = e.derivative(vars[i]);
  }
  return e;
}

struct RealSym {
  SymExpr e;
  RealSym derivative(const std::string& v) const { return {differentiate(e, v)}; }
};

}  // namespace detail

/// Symbol of the adjoint with respect to the density, grouped by order:
/// result[k] is the part of order m - k, for k = 0..depth. With depth at least the
/// differential order of P the sum is the exact adjoint symbol.
///   Lebesgue adjoint: a* = sum_a (1/a!) d_xi^a D_x^a conj(a)
///   weighted:         P*_mu = mu^-1 P*_Leb mu, adding sum_g (1/g!) d_xi^g a* . D_x^g mu / mu
inline std::vector<ComplexSym> formal_adjoint_symbol(const OperatorSpec& op, int depth = 1) {
  const std::size_t n = op.chart.dimension();
  std::vector<std::vector<int>> indices;
  detail::multi_indices(n, depth, indices);

  std::vector<ComplexSym> lebesgue(static_cast<std::size_t>(depth) + 1);
  for (std::size_t j = 0; j < op.terms.size() && static_cast<int>(j) <= depth; ++j) {
    const ComplexSym conj = op.terms[j].conj();
    for (const auto& a : indices) {
      const int order = detail::total(a);
      if (static_cast<int>(j) + order > depth) continue;
      ComplexSym piece = detail::derive(detail::derive(conj, op.chart.base, a), op.chart.fiber, a);
      piece = piece.times_minus_i_power(order).scaled(1.0 / detail::factorial(a));
      lebesgue[j + order] = lebesgue[j + order] + piece;
    }
  }
  if (op.density.is_constant()) return lebesgue;

  std::vector<ComplexSym> weighted(lebesgue.size());
  for (std::size_t k = 0; k < lebesgue.size(); ++k) {
    for (const auto& g : indices) {
      const int order = detail::total(g);
      if (static_cast<int>(k) + order > depth) continue;
      const SymExpr ratio = detail::derive(detail::RealSym{op.density}, op.chart.base, g).e / op.density;
      if (ratio.is_constant(0.0)) continue;
      ComplexSym piece = detail::derive(lebesgue[k], op.chart.fiber, g);
      piece = piece.scaled(ratio / detail::factorial(g)).times_minus_i_power(order);
      weighted[k + order] = weighted[k + order] + piece;
    }
  }
  return weighted;
}

/// Real representative of the order m-1 part of (sigma(P) - sigma(P*)) / 2i.
inline SymExpr subprincipal_difference(const OperatorSpec& op) {
  const auto adjoint = formal_adjoint_symbol(op, 1);
  const ComplexSym diff = op.term(1) - adjoint[1];
  // (re + i im) / 2i = im/2 - i re/2; for real p_m the imaginary part vanishes.
  return 0.5 * diff.im;
}

}  // namespace radialscope
