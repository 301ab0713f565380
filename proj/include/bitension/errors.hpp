#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bitension {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Illegal character in an expression string.
class LexError : public Error {
 public:
  LexError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Malformed expression: unexpected token, unbalanced parentheses, bad arity.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A free identifier had no binding at evaluation time.
class UnboundNameError : public Error {
 public:
  explicit UnboundNameError(const std::string& name)
      : Error("unbound identifier '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// An elementary function was applied outside its domain (ln of a
/// non-positive value, division by zero, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double value) : Error(what), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Geometric precondition failure: point outside a chart, non positive
/// definite metric, degenerate immersion, non-conformal input, ...
class GeometryError : public Error {
 public:
  GeometryError(const std::string& what, std::vector<double> point = {})
      : Error(what), point_(std::move(point)) {}
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// Parameters that make the construction invalid (for example a conformal
/// factor that crosses zero inside the requested range).
class ParameterRejected : public Error {
 public:
  ParameterRejected(const std::string& what, double location)
      : Error(what), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// Configuration or command-line usage problem.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace bitension
