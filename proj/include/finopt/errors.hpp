#pragma once

#include <stdexcept>
#include <string>

namespace finopt {

/// Input violates a documented precondition (non-positive conductivity,
/// sample point outside the fin, too coarse a mesh, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The discrete fin system could not be solved to a finite answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer failure: lost bracket, runaway compliance, no interior minimum.
class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input table. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace finopt
