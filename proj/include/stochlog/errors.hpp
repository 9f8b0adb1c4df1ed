#pragma once

#include <stdexcept>
#include <string>

namespace stochlog {

/// Invalid parameters or configuration, detected before any work starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (linear solve, quadrature, NaN from a backend).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double diagnostic = 0.0)
      : std::runtime_error(what), diagnostic_(diagnostic) {}

  /// Residual norm, error estimate, or offending value, depending on the source.
  double diagnostic() const noexcept { return diagnostic_; }

 private:
  double diagnostic_;
};

/// The scale density is not representable as a double; the log value is kept.
class ScaleOverflow : public std::range_error {
 public:
  explicit ScaleOverflow(double log_value)
      : std::range_error("scale density not representable (log value " +
                         std::to_string(log_value) + ")"),
        log_value_(log_value) {}

  double log_value() const noexcept { return log_value_; }

 private:
  double log_value_;
};

/// Query outside the finite-difference grid.
class OutOfGrid : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace stochlog
