#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace radialscope {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : ParseError("unknown identifier '" + name + "'", offset), name_(name) {}
  const std::string& identifier() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Numeric evaluation produced a non-finite value; carries the offending point.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& message, std::vector<double> point)
      : Error(message), point_(std::move(point)) {}
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

class NotCanonical : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// Nondegeneracy (dp != 0, lambda elliptic) fails.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A vector field does not vanish where a blow-up needs it to.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A radicand that must be sign-definite changes sign at a sampled point.
class SignViolation : public Error {
 public:
  SignViolation(const std::string& message, std::vector<double> point, double value)
      : Error(message), point_(std::move(point)), value_(value) {}
  const std::vector<double>& point() const noexcept { return point_; }
  double value() const noexcept { return value_; }

 private:
  std::vector<double> point_;
  double value_;
};

class SearchExhausted : public Error {
 public:
  using Error::Error;
};

class DerivativeUnavailable : public Error {
 public:
  using Error::Error;
};

class BandUnsafe : public Error {
 public:
  using Error::Error;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::size_t line = 0, std::string field = {})
      : Error(format(message, line, field)), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& message, std::size_t line, const std::string& field) {
    std::string out = message;
    if (!field.empty()) out += " (field '" + field + "')";
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    return out;
  }
  std::size_t line_;
  std::string field_;
};

}  // namespace radialscope
