#pragma once

// Infix expression grammar (precedence climbing, lowest first):
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := ('-' | '+') unary | power
//   power   := primary [ '^' unary ]            (right associative, -x^2 = -(x^2))
//   primary := number | name | name '(' expr { ',' expr } ')' | '(' expr ')'
//
// Names match [A-Za-z][A-Za-z0-9_]*. A name followed by '(' must be a registered
// function; any other name must be a declared variable.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radialscope/symcore/expr.hpp"
#include "radialscope/symcore/functions.hpp"

namespace radialscope {

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> variables, const FunctionTable& functions)
      : text_(text), variables_(variables), functions_(functions) {}

  SymExpr parse() {
    SymExpr e = expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
    if (text_[pos_] != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  SymExpr expr() {
    SymExpr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  SymExpr term() {
    SymExpr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        lhs = lhs / unary();
      } else {
        return lhs;
      }
    }
  }

  SymExpr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  SymExpr power() {
    SymExpr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  SymExpr primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    if (c == '(') {
      ++pos_;
      SymExpr inner = expr();
      expect(')');
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  SymExpr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) throw ParseError("malformed number", start);
    return value;
  }

  SymExpr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      auto fn = functions_.find(id);
      if (!fn) throw UnknownIdentifier(id, start);
      ++pos_;
      std::vector<SymExpr> args;
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      expect(')');
      if (args.size() != fn->arity()) {
        throw ParseError("function '" + id + "' expects " + std::to_string(fn->arity()) + " argument(s)", start);
      }
      return SymExpr::apply(fn, std::move(args));
    }
    if (std::find(variables_.begin(), variables_.end(), id) == variables_.end()) {
      throw UnknownIdentifier(id, start);
    }
    return SymExpr::variable(id);
  }

  std::string_view text_;
  std::span<const std::string> variables_;
  const FunctionTable& functions_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline SymExpr parse(std::string_view text, std::span<const std::string> variables,
                     const FunctionTable& functions = default_functions()) {
  return detail::Parser(text, variables, functions).parse();
}

inline SymExpr parse(std::string_view text, std::initializer_list<std::string> variables,
                     const FunctionTable& functions = default_functions()) {
  std::vector<std::string> v(variables);
  return parse(text, std::span<const std::string>(v), functions);
}

}  // namespace radialscope
