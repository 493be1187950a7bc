#pragma once

// Immutable symbolic expression trees.
//
// A SymExpr is a shared handle to an immutable node, so subtrees are shared freely
// and a whole expression can be read from several threads at once. The builders
// below fold constants and drop neutral elements; they never expand or reorder
// beyond moving a constant factor to the front of a product.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radialscope/errors.hpp"

namespace radialscope {

class SymExpr;

/// Named function with a numeric evaluator and a derivative rule per argument.
/// Expressions never look inside a special function; they only call these hooks.
class SpecialFunction {
 public:
  virtual ~SpecialFunction() = default;
  virtual const std::string& name() const = 0;
  virtual std::size_t arity() const = 0;
  virtual double evaluate(std::span<const double> args) const = 0;
  /// d f / d arg_index, written in terms of the argument expressions.
  virtual SymExpr partial(std::size_t index, std::span<const SymExpr> args) const = 0;
};

using SpecialFunctionPtr = std::shared_ptr<const SpecialFunction>;

enum class NodeKind { constant, variable, sum, product, quotient, power, function };

namespace detail {
struct Node;
}

class SymExpr {
 public:
  SymExpr();
  SymExpr(double value);  // NOLINT(google-explicit-constructor): numeric literals read naturally in formulas.

  static SymExpr constant(double value) { return SymExpr(value); }
  static SymExpr variable(std::string name);
  static SymExpr apply(SpecialFunctionPtr fn, std::vector<SymExpr> args);

  NodeKind kind() const;
  double value() const;
  const std::string& name() const;
  std::span<const SymExpr> children() const;
  const SpecialFunctionPtr& function() const;

  bool is_constant() const { return kind() == NodeKind::constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }
  /// True for (-1)*x; `negated()` then returns x.
  bool is_negation() const;
  const SymExpr& negated() const { return children()[1]; }

  /// Node identity; equal ids mean the very same subtree.
  const void* id() const { return node_.get(); }
  bool same(const SymExpr& other) const { return node_ == other.node_; }

  std::string to_string() const;

 private:
  explicit SymExpr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  static SymExpr make(NodeKind kind, std::vector<SymExpr> children);

  std::shared_ptr<const detail::Node> node_;

  friend SymExpr operator+(const SymExpr&, const SymExpr&);
  friend SymExpr operator*(const SymExpr&, const SymExpr&);
  friend SymExpr operator/(const SymExpr&, const SymExpr&);
  friend SymExpr pow(const SymExpr&, const SymExpr&);
};

namespace detail {
struct Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;
  std::string name;
  std::vector<SymExpr> children;
  SpecialFunctionPtr fn;
};
}  // namespace detail

inline SymExpr::SymExpr() : SymExpr(0.0) {}

inline SymExpr::SymExpr(double value) {
  auto n = std::make_shared<detail::Node>();
  n->kind = NodeKind::constant;
  n->value = value;
  node_ = std::move(n);
}

inline SymExpr SymExpr::variable(std::string name) {
  auto n = std::make_shared<detail::Node>();
  n->kind = NodeKind::variable;
  n->name = std::move(name);
  return SymExpr(std::shared_ptr<const detail::Node>(std::move(n)));
}

inline SymExpr SymExpr::make(NodeKind kind, std::vector<SymExpr> children) {
  auto n = std::make_shared<detail::Node>();
  n->kind = kind;
  n->children = std::move(children);
  return SymExpr(std::shared_ptr<const detail::Node>(std::move(n)));
}

inline SymExpr SymExpr::apply(SpecialFunctionPtr fn, std::vector<SymExpr> args) {
  if (!fn) throw InvalidParameters("null special function");
  if (args.size() != fn->arity()) {
    throw InvalidParameters("function '" + fn->name() + "' expects " + std::to_string(fn->arity()) +
                            " argument(s), got " + std::to_string(args.size()));
  }
  bool all_constant = true;
  for (const auto& a : args) all_constant = all_constant && a.is_constant();
  if (all_constant) {
    std::vector<double> values;
    values.reserve(args.size());
    for (const auto& a : args) values.push_back(a.value());
    const double v = fn->evaluate(values);
    if (std::isfinite(v)) return SymExpr(v);
  }
  auto n = std::make_shared<detail::Node>();
  n->kind = NodeKind::function;
  n->children = std::move(args);
  n->fn = std::move(fn);
  return SymExpr(std::shared_ptr<const detail::Node>(std::move(n)));
}

inline NodeKind SymExpr::kind() const { return node_->kind; }
inline double SymExpr::value() const { return node_->value; }
inline const std::string& SymExpr::name() const {
  return node_->kind == NodeKind::function ? node_->fn->name() : node_->name;
}
inline std::span<const SymExpr> SymExpr::children() const { return node_->children; }
inline const SpecialFunctionPtr& SymExpr::function() const { return node_->fn; }

inline bool SymExpr::is_negation() const {
  return kind() == NodeKind::product && children()[0].is_constant(-1.0);
}

// ---------------------------------------------------------------------------
// Builders

inline SymExpr operator*(const SymExpr& a, const SymExpr& b);

inline SymExpr operator-(const SymExpr& a) {
  if (a.is_constant()) return SymExpr(-a.value());
  if (a.is_negation()) return a.negated();
  return SymExpr(-1.0) * a;
}

inline SymExpr operator+(const SymExpr& a, const SymExpr& b) {
  if (a.is_constant() && b.is_constant()) return SymExpr(a.value() + b.value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if ((b.is_negation() && b.negated().same(a)) || (a.is_negation() && a.negated().same(b))) {
    return SymExpr(0.0);
  }
  return SymExpr::make(NodeKind::sum, {a, b});
}

inline SymExpr operator-(const SymExpr& a, const SymExpr& b) {
  if (a.same(b)) return SymExpr(0.0);
  return a + (-b);
}

inline SymExpr operator*(const SymExpr& a, const SymExpr& b) {
  if (a.is_constant() && b.is_constant()) return SymExpr(a.value() * b.value());
  if (!a.is_constant() && b.is_constant()) return b * a;
  if (a.is_constant(0.0)) return SymExpr(0.0);
  if (a.is_constant(1.0)) return b;
  if (a.is_constant() && b.kind() == NodeKind::product && b.children()[0].is_constant()) {
    return SymExpr(a.value() * b.children()[0].value()) * b.children()[1];
  }
  return SymExpr::make(NodeKind::product, {a, b});
}

inline SymExpr operator/(const SymExpr& a, const SymExpr& b) {
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return SymExpr(0.0);
  if (a.is_constant() && b.is_constant() && b.value() != 0.0) return SymExpr(a.value() / b.value());
  if (b.is_constant(-1.0)) return -a;
  if (a.same(b)) return SymExpr(1.0);
  return SymExpr::make(NodeKind::quotient, {a, b});
}

inline SymExpr pow(const SymExpr& base, const SymExpr& exponent) {
  if (exponent.is_constant(0.0)) return SymExpr(1.0);
  if (exponent.is_constant(1.0)) return base;
  if (base.is_constant(1.0)) return SymExpr(1.0);
  if (base.is_constant() && exponent.is_constant()) {
    const double v = std::pow(base.value(), exponent.value());
    if (std::isfinite(v)) return SymExpr(v);
  }
  return SymExpr::make(NodeKind::power, {base, exponent});
}

inline SymExpr& operator+=(SymExpr& a, const SymExpr& b) { return a = a + b; }
inline SymExpr& operator-=(SymExpr& a, const SymExpr& b) { return a = a - b; }
inline SymExpr& operator*=(SymExpr& a, const SymExpr& b) { return a = a * b; }
inline SymExpr& operator/=(SymExpr& a, const SymExpr& b) { return a = a / b; }

inline SymExpr square(const SymExpr& a) { return pow(a, SymExpr(2.0)); }

// ---------------------------------------------------------------------------
// Printing. Output re-parses to an expression that prints identically.

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// 1 sum, 2 product/quotient, 3 unary minus, 4 power, 5 atom
inline int precedence(const SymExpr& e) {
  switch (e.kind()) {
    case NodeKind::constant: return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
    case NodeKind::variable: return 5;
    case NodeKind::function: return 5;
    case NodeKind::sum: return 1;
    case NodeKind::product: return e.is_negation() ? 3 : 2;
    case NodeKind::quotient: return 2;
    case NodeKind::power: return 4;
  }
  return 5;
}

inline void print(const SymExpr& e, std::string& out);

inline void print_wrapped(const SymExpr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

inline void print(const SymExpr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::constant: {
      const double v = e.value();
      if (std::isnan(v)) {
        out += "nan";
      } else if (std::isinf(v)) {
        out += v > 0 ? "inf" : "-inf";
      } else {
        out += format_number(v);
      }
      return;
    }
    case NodeKind::variable: out += e.name(); return;
    case NodeKind::function: {
      out += e.name();
      out += '(';
      bool first = true;
      for (const auto& c : e.children()) {
        if (!first) out += ", ";
        first = false;
        print(c, out);
      }
      out += ')';
      return;
    }
    case NodeKind::sum: {
      const SymExpr& a = e.children()[0];
      const SymExpr& b = e.children()[1];
      print(a, out);
      if (b.is_negation()) {
        out += " - ";
        print_wrapped(b.negated(), precedence(b.negated()) <= 1, out);
      } else if (b.is_constant() && b.value() < 0.0) {
        out += " - ";
        out += format_number(-b.value());
      } else {
        out += " + ";
        print_wrapped(b, precedence(b) <= 1, out);
      }
      return;
    }
    case NodeKind::product: {
      const SymExpr& a = e.children()[0];
      const SymExpr& b = e.children()[1];
      if (e.is_negation()) {
        out += '-';
        print_wrapped(b, precedence(b) <= 1, out);
        return;
      }
      print_wrapped(a, precedence(a) < 2, out);
      out += '*';
      print_wrapped(b, precedence(b) <= 1, out);
      return;
    }
    case NodeKind::quotient: {
      const SymExpr& a = e.children()[0];
      const SymExpr& b = e.children()[1];
      print_wrapped(a, precedence(a) < 2, out);
      out += '/';
      print_wrapped(b, precedence(b) <= 3, out);
      return;
    }
    case NodeKind::power: {
      const SymExpr& a = e.children()[0];
      const SymExpr& b = e.children()[1];
      print_wrapped(a, precedence(a) <= 4, out);
      out += '^';
      print_wrapped(b, precedence(b) < 4, out);
      return;
    }
  }
}

}  // namespace detail

inline std::string SymExpr::to_string() const {
  std::string out;
  detail::print(*this, out);
  return out;
}

}  // namespace radialscope
