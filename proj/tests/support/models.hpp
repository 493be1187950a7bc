#pragma once

#include <complex>
#include <string>

#include "radialscope/threshold.hpp"

namespace models {

namespace rs = radialscope;

/// x D_x - c on the line with the given density.
inline rs::OperatorSpec xdx(std::complex<double> c, const char* density = "1") {
  const auto chart = rs::ChartSpec::standard(1);
  rs::OperatorSpec op;
  op.chart = chart;
  op.order = 1.0;
  op.terms = {rs::ComplexSym(rs::parse("x*xi", chart)), rs::ComplexSym(-c.real(), -c.imag())};
  op.density = rs::parse(density, chart);
  return op;
}

/// Operator with the given real principal symbol and complex lower-order term.
inline rs::OperatorSpec op(const rs::ChartSpec& chart, double order, const char* principal, const char* lower_re = "0",
                           const char* lower_im = "0", const char* density = "1") {
  rs::OperatorSpec o;
  o.chart = chart;
  o.order = order;
  o.terms = {rs::ComplexSym(rs::parse(principal, chart)),
             rs::ComplexSym(rs::parse(lower_re, chart), rs::parse(lower_im, chart))};
  o.density = rs::parse(density, chart);
  return o;
}

inline rs::RadialChart chart_for(const rs::OperatorSpec& o, int branch = 1) {
  return rs::build_normal_coordinates(o.principal(), {o.chart, branch});
}

}  // namespace models
