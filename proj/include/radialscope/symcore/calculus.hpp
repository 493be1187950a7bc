#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "radialscope/symcore/expr.hpp"
#include "radialscope/symcore/functions.hpp"

namespace radialscope {

namespace detail {

// Rebuilds a node over new children with the simplifying builders.
inline SymExpr rebuild(const SymExpr& e, std::vector<SymExpr> kids) {
  switch (e.kind()) {
    case NodeKind::sum: return kids[0] + kids[1];
    case NodeKind::product: return kids[0] * kids[1];
    case NodeKind::quotient: return kids[0] / kids[1];
    case NodeKind::power: return pow(kids[0], kids[1]);
    case NodeKind::function: return SymExpr::apply(e.function(), std::move(kids));
    default: return e;
  }
}

class Differentiator {
 public:
  explicit Differentiator(const std::string& var) : var_(var) {}

  SymExpr operator()(const SymExpr& e) {
    auto it = cache_.find(e.id());
    if (it != cache_.end()) return it->second;
    SymExpr d = compute(e);
    cache_.emplace(e.id(), d);
    return d;
  }

 private:
  SymExpr compute(const SymExpr& e) {
    switch (e.kind()) {
      case NodeKind::constant: return 0.0;
      case NodeKind::variable: return e.name() == var_ ? 1.0 : 0.0;
      case NodeKind::sum: return (*this)(e.children()[0]) + (*this)(e.children()[1]);
      case NodeKind::product: {
        const auto& a = e.children()[0];
        const auto& b = e.children()[1];
        return (*this)(a) * b + a * (*this)(b);
      }
      case NodeKind::quotient: {
        const auto& a = e.children()[0];
        const auto& b = e.children()[1];
        const SymExpr da = (*this)(a);
        const SymExpr db = (*this)(b);
        if (db.is_constant(0.0)) return da / b;
        return (da * b - a * db) / square(b);
      }
      case NodeKind::power: {
        const auto& base = e.children()[0];
        const auto& ex = e.children()[1];
        const SymExpr dbase = (*this)(base);
        if (ex.is_constant()) {
          if (dbase.is_constant(0.0)) return 0.0;
          return SymExpr(ex.value()) * pow(base, SymExpr(ex.value() - 1.0)) * dbase;
        }
        const SymExpr dex = (*this)(ex);
        if (base.is_constant()) return std::log(base.value()) * e * dex;
        return e * (dex * log(base) + ex * dbase / base);
      }
      case NodeKind::function: {
        const auto args = e.children();
        SymExpr total = 0.0;
        for (std::size_t i = 0; i < args.size(); ++i) {
          const SymExpr darg = (*this)(args[i]);
          if (darg.is_constant(0.0)) continue;
          total += e.function()->partial(i, args) * darg;
        }
        return total;
      }
    }
    return 0.0;
  }

  const std::string& var_;
  std::unordered_map<const void*, SymExpr> cache_;
};

}  // namespace detail

/// Partial derivative with respect to a named variable. Shared subtrees are
/// differentiated once, so the result keeps the sharing of the input.
inline SymExpr differentiate(const SymExpr& e, const std::string& var) {
  detail::Differentiator d(var);
  return d(e);
}

/// Simultaneous substitution of variables by expressions.
inline SymExpr substitute(const SymExpr& e, const std::map<std::string, SymExpr>& replacements) {
  std::unordered_map<const void*, SymExpr> cache;
  auto go = [&](auto&& self, const SymExpr& x) -> SymExpr {
    auto it = cache.find(x.id());
    if (it != cache.end()) return it->second;
    SymExpr out = x;
    if (x.kind() == NodeKind::variable) {
      auto r = replacements.find(x.name());
      if (r != replacements.end()) out = r->second;
    } else if (x.kind() != NodeKind::constant) {
      std::vector<SymExpr> kids;
      bool changed = false;
      for (const auto& c : x.children()) {
        kids.push_back(self(self, c));
        changed = changed || !kids.back().same(c);
      }
      if (changed) out = detail::rebuild(x, std::move(kids));
    }
    cache.emplace(x.id(), out);
    return out;
  };
  return go(go, e);
}

inline SymExpr substitute(const SymExpr& e, const std::string& var, const SymExpr& replacement) {
  return substitute(e, std::map<std::string, SymExpr>{{var, replacement}});
}

inline std::set<std::string> free_variables(const SymExpr& e) {
  std::set<std::string> out;
  std::unordered_map<const void*, bool> seen;
  auto go = [&](auto&& self, const SymExpr& x) -> void {
    if (!seen.emplace(x.id(), true).second) return;
    if (x.kind() == NodeKind::variable) out.insert(x.name());
    for (const auto& c : x.children()) self(self, c);
  };
  go(go, e);
  return out;
}

/// Number of distinct nodes (shared subtrees counted once).
inline std::size_t node_count(const SymExpr& e) {
  std::unordered_map<const void*, bool> seen;
  auto go = [&](auto&& self, const SymExpr& x) -> void {
    if (!seen.emplace(x.id(), true).second) return;
    for (const auto& c : x.children()) self(self, c);
  };
  go(go, e);
  return seen.size();
}

}  // namespace radialscope
