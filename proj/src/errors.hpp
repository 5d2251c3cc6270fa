#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hydrolimit {

enum class ErrorCode {
  Config = 1,
  Validation = 2,
  Divergence = 3,
  Io = 4,
  Parse = 5,
  Domain = 6,
  State = 7,
  Shape = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Invalid construction parameters (mode counts, grid sizes, CFL, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::Config, what) {}
};

/// Configuration file contents that violate one or more field constraints.
/// Every violation found is collected, not only the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(ErrorCode::Validation, join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, unsigned long line)
      : Error(ErrorCode::Parse, what), line_(line) {}
  unsigned long line() const noexcept { return line_; }

 private:
  unsigned long line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

/// Argument outside the mathematical domain of an operation (kernel input, eps = 0).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

/// Physical state left its admissible set (nonpositive density).
class StateError : public Error {
 public:
  explicit StateError(const std::string& what) : Error(ErrorCode::State, what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorCode::Shape, what) {}
};

/// Nonfinite values produced by time stepping.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step)
      : Error(ErrorCode::Divergence, what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace hydrolimit
