#pragma once

#include <stdexcept>
#include <string>

namespace zk {

/// Precondition on an argument violated (bad grid size, parameter range, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation applied to an object in the wrong state, e.g. a Field in the wrong representation.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A Fourier multiplier is not finite at a lattice point where it is needed.
class SingularMultiplier : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite values appeared during time stepping.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Adaptive quadrature did not reach the requested accuracy.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The grid cannot resolve the frequency shells an experiment needs.
class GridTooCoarse : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed run configuration; `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace zk
