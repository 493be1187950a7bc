#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "radialscope/symcore/expr.hpp"

namespace radialscope {

/// SpecialFunction assembled from closures; enough for every function the library registers.
class LambdaFunction final : public SpecialFunction {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;
  using PartialRule = std::function<SymExpr(std::size_t, std::span<const SymExpr>)>;

  LambdaFunction(std::string name, std::size_t arity, Evaluator eval, PartialRule partial)
      : name_(std::move(name)), arity_(arity), eval_(std::move(eval)), partial_(std::move(partial)) {}

  const std::string& name() const override { return name_; }
  std::size_t arity() const override { return arity_; }
  double evaluate(std::span<const double> args) const override { return eval_(args); }
  SymExpr partial(std::size_t index, std::span<const SymExpr> args) const override {
    return partial_(index, args);
  }

 private:
  std::string name_;
  std::size_t arity_;
  Evaluator eval_;
  PartialRule partial_;
};

/// Name -> function lookup used by the parser.
class FunctionTable {
 public:
  void add(SpecialFunctionPtr fn) { table_[fn->name()] = std::move(fn); }
  SpecialFunctionPtr find(const std::string& name) const {
    auto it = table_.find(name);
    return it == table_.end() ? nullptr : it->second;
  }
  bool contains(const std::string& name) const { return table_.count(name) != 0; }

 private:
  std::map<std::string, SpecialFunctionPtr> table_;
};

namespace fn {

namespace detail {

inline SpecialFunctionPtr unary(std::string name, double (*f)(double),
                                std::function<SymExpr(const SymExpr&)> derivative) {
  return std::make_shared<LambdaFunction>(
      std::move(name), 1, [f](std::span<const double> a) { return f(a[0]); },
      [derivative = std::move(derivative)](std::size_t, std::span<const SymExpr> a) {
        return derivative(a[0]);
      });
}

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
inline double sqrt_plus(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }

}  // namespace detail

// Singletons; the derivative rules refer back to them, so they are built lazily.
inline const SpecialFunctionPtr& exp();
inline const SpecialFunctionPtr& log();
inline const SpecialFunctionPtr& sin();
inline const SpecialFunctionPtr& cos();
inline const SpecialFunctionPtr& sqrt();
inline const SpecialFunctionPtr& sqrtp();
inline const SpecialFunctionPtr& tanh();
inline const SpecialFunctionPtr& abs();
inline const SpecialFunctionPtr& sign();

inline const SpecialFunctionPtr& exp() {
  static const SpecialFunctionPtr f = detail::unary(
      "exp", +[](double x) { return std::exp(x); },
      [](const SymExpr& a) { return SymExpr::apply(fn::exp(), {a}); });
  return f;
}

inline const SpecialFunctionPtr& log() {
  static const SpecialFunctionPtr f = detail::unary(
      "log", +[](double x) { return std::log(x); }, [](const SymExpr& a) { return SymExpr(1.0) / a; });
  return f;
}

inline const SpecialFunctionPtr& sin() {
  static const SpecialFunctionPtr f = detail::unary(
      "sin", +[](double x) { return std::sin(x); },
      [](const SymExpr& a) { return SymExpr::apply(fn::cos(), {a}); });
  return f;
}

inline const SpecialFunctionPtr& cos() {
  static const SpecialFunctionPtr f = detail::unary(
      "cos", +[](double x) { return std::cos(x); },
      [](const SymExpr& a) { return -SymExpr::apply(fn::sin(), {a}); });
  return f;
}

inline const SpecialFunctionPtr& sqrt() {
  static const SpecialFunctionPtr f = detail::unary(
      "sqrt", +[](double x) { return std::sqrt(x); },
      [](const SymExpr& a) { return SymExpr(0.5) / SymExpr::apply(fn::sqrt(), {a}); });
  return f;
}

/// sqrt clamped at zero: radicands that are sign-checked elsewhere may round to -1e-17.
inline const SpecialFunctionPtr& sqrtp() {
  static const SpecialFunctionPtr f = detail::unary(
      "sqrtp", &detail::sqrt_plus,
      [](const SymExpr& a) { return SymExpr(0.5) / SymExpr::apply(fn::sqrtp(), {a}); });
  return f;
}

inline const SpecialFunctionPtr& tanh() {
  static const SpecialFunctionPtr f = detail::unary(
      "tanh", +[](double x) { return std::tanh(x); },
      [](const SymExpr& a) { return SymExpr(1.0) - square(SymExpr::apply(fn::tanh(), {a})); });
  return f;
}

inline const SpecialFunctionPtr& abs() {
  static const SpecialFunctionPtr f = detail::unary(
      "abs", +[](double x) { return std::fabs(x); },
      [](const SymExpr& a) { return SymExpr::apply(fn::sign(), {a}); });
  return f;
}

inline const SpecialFunctionPtr& sign() {
  static const SpecialFunctionPtr f =
      detail::unary("sign", &detail::sign_of, [](const SymExpr&) { return SymExpr(0.0); });
  return f;
}

}  // namespace fn

inline SymExpr exp(const SymExpr& a) { return SymExpr::apply(fn::exp(), {a}); }
inline SymExpr log(const SymExpr& a) { return SymExpr::apply(fn::log(), {a}); }
inline SymExpr sin(const SymExpr& a) { return SymExpr::apply(fn::sin(), {a}); }
inline SymExpr cos(const SymExpr& a) { return SymExpr::apply(fn::cos(), {a}); }
inline SymExpr sqrt(const SymExpr& a) { return SymExpr::apply(fn::sqrt(), {a}); }
inline SymExpr sqrtp(const SymExpr& a) { return SymExpr::apply(fn::sqrtp(), {a}); }
inline SymExpr tanh(const SymExpr& a) { return SymExpr::apply(fn::tanh(), {a}); }
inline SymExpr abs(const SymExpr& a) { return SymExpr::apply(fn::abs(), {a}); }

/// exp, log, sin, cos, sqrt, sqrtp, tanh, abs, sign.
inline const FunctionTable& default_functions() {
  static const FunctionTable table = [] {
    FunctionTable t;
    for (const auto& f : {fn::exp(), fn::log(), fn::sin(), fn::cos(), fn::sqrt(), fn::sqrtp(), fn::tanh(),
                          fn::abs(), fn::sign()}) {
      t.add(f);
    }
    return t;
  }();
  return table;
}

}  // namespace radialscope
