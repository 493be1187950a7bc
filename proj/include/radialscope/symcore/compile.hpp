#pragma once

// Flattens one or more expressions into a straight-line program over a fixed
// variable ordering. Shared subtrees become a single instruction, so evaluation
// cost follows the DAG size rather than the tree size.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "radialscope/symcore/expr.hpp"

namespace radialscope {

class CompiledExpr {
 public:
  CompiledExpr() = default;

  CompiledExpr(std::span<const SymExpr> outputs, std::vector<std::string> variables)
      : variables_(std::move(variables)) {
    std::unordered_map<const void*, int> slot;
    for (const auto& e : outputs) outputs_.push_back(emit(e, slot));
  }

  CompiledExpr(const SymExpr& output, std::vector<std::string> variables)
      : CompiledExpr(std::span<const SymExpr>(&output, 1), std::move(variables)) {}

  const std::vector<std::string>& variables() const { return variables_; }
  std::size_t output_count() const { return outputs_.size(); }
  std::size_t instruction_count() const { return code_.size(); }

  /// Evaluates every output. `scratch` is resized as needed and may be reused across calls.
  void evaluate(std::span<const double> vars, std::span<double> out, std::vector<double>& scratch) const {
    if (scratch.size() < code_.size()) scratch.resize(code_.size());
    double args[8];
    std::vector<double> wide_args;
    for (std::size_t i = 0; i < code_.size(); ++i) {
      const Instr& in = code_[i];
      double v = 0.0;
      switch (in.op) {
        case Op::constant: v = in.value; break;
        case Op::variable: v = vars[in.a]; break;
        case Op::add: v = scratch[in.a] + scratch[in.b]; break;
        case Op::mul: v = scratch[in.a] * scratch[in.b]; break;
        case Op::div: v = scratch[in.a] / scratch[in.b]; break;
        case Op::ipow: v = integer_power(scratch[in.a], static_cast<int>(in.value)); break;
        case Op::pow: v = std::pow(scratch[in.a], scratch[in.b]); break;
        case Op::call: {
          const auto n = in.args.size();
          double* dst = args;
          if (n > 8) {
            wide_args.resize(n);
            dst = wide_args.data();
          }
          for (std::size_t k = 0; k < n; ++k) dst[k] = scratch[in.args[k]];
          v = in.fn->evaluate(std::span<const double>(dst, n));
          break;
        }
      }
      scratch[i] = v;
    }
    for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = scratch[outputs_[k]];
  }

  /// Single-output convenience; allocates its own scratch.
  double operator()(std::span<const double> vars) const {
    std::vector<double> scratch;
    std::vector<double> out(outputs_.size());
    evaluate(vars, out, scratch);
    return out.empty() ? 0.0 : out[0];
  }

  std::vector<double> evaluate_all(std::span<const double> vars) const {
    std::vector<double> scratch;
    std::vector<double> out(outputs_.size());
    evaluate(vars, out, scratch);
    return out;
  }

 private:
  enum class Op { constant, variable, add, mul, div, ipow, pow, call };
  struct Instr {
    Op op = Op::constant;
    int a = 0;
    int b = 0;
    double value = 0.0;
    SpecialFunctionPtr fn;
    std::vector<int> args;
  };

  static double integer_power(double x, int k) {
    if (k < 0) return 1.0 / integer_power(x, -k);
    double r = 1.0;
    double base = x;
    while (k > 0) {
      if (k & 1) r *= base;
      base *= base;
      k >>= 1;
    }
    return r;
  }

  int emit(const SymExpr& e, std::unordered_map<const void*, int>& slot) {
    if (auto it = slot.find(e.id()); it != slot.end()) return it->second;
    Instr in;
    switch (e.kind()) {
      case NodeKind::constant:
        in.op = Op::constant;
        in.value = e.value();
        break;
      case NodeKind::variable: {
        auto it = std::find(variables_.begin(), variables_.end(), e.name());
        if (it == variables_.end()) {
          throw InvalidParameters("variable '" + e.name() + "' is not in the evaluation ordering");
        }
        in.op = Op::variable;
        in.a = static_cast<int>(it - variables_.begin());
        break;
      }
      case NodeKind::sum:
      case NodeKind::product:
      case NodeKind::quotient: {
        in.a = emit(e.children()[0], slot);
        in.b = emit(e.children()[1], slot);
        in.op = e.kind() == NodeKind::sum ? Op::add : (e.kind() == NodeKind::product ? Op::mul : Op::div);
        break;
      }
      case NodeKind::power: {
        in.a = emit(e.children()[0], slot);
        const SymExpr& ex = e.children()[1];
        if (ex.is_constant() && ex.value() == std::round(ex.value()) && std::fabs(ex.value()) <= 64.0) {
          in.op = Op::ipow;
          in.value = ex.value();
        } else {
          in.b = emit(ex, slot);
          in.op = Op::pow;
        }
        break;
      }
      case NodeKind::function: {
        for (const auto& c : e.children()) in.args.push_back(emit(c, slot));
        in.op = Op::call;
        in.fn = e.function();
        break;
      }
    }
    code_.push_back(std::move(in));
    const int idx = static_cast<int>(code_.size()) - 1;
    slot.emplace(e.id(), idx);
    return idx;
  }

  std::vector<std::string> variables_;
  std::vector<Instr> code_;
  std::vector<int> outputs_;
};

/// One-off evaluation of an expression at named values.
inline double evaluate(const SymExpr& e, const std::vector<std::string>& names, std::span<const double> values) {
  return CompiledExpr(e, names)(values);
}

}  // namespace radialscope
