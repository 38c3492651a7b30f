#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cokrig {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Result not representable in double precision.
class RangeError : public std::range_error {
public:
  using std::range_error::range_error;
};

// Iterative method (series, adaptive quadrature, search) failed to converge.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A series evaluation was declined because it cannot deliver the requested
// accuracy. Callers are expected to switch to another evaluation route.
class SeriesRefusedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// |z| beyond the configured series cutoff.
class CutoffError : public SeriesRefusedError {
public:
  using SeriesRefusedError::SeriesRefusedError;
};

// Cancellation between terms would destroy the requested relative accuracy.
class PrecisionLossError : public SeriesRefusedError {
public:
  using SeriesRefusedError::SeriesRefusedError;
};

// A truncated integral whose neglected tail is not small enough.
class TruncationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Overflow in a quantity that is only representable on the log scale.
class OverflowError : public std::overflow_error {
public:
  OverflowError(const std::string& what, double log_value)
      : std::overflow_error(what), log_value_(log_value) {}
  double log_value() const noexcept { return log_value_; }

private:
  double log_value_;
};

// Covariance matrix not numerically positive definite.
class CholeskyError : public std::runtime_error {
public:
  CholeskyError(const std::string& what, std::size_t pivot_index,
                double condition_estimate)
      : std::runtime_error(what),
        pivot_index_(pivot_index),
        condition_estimate_(condition_estimate) {}
  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double condition_estimate() const noexcept { return condition_estimate_; }

private:
  std::size_t pivot_index_;
  double condition_estimate_;
};

// Malformed input file (JSON model, config, CSV).
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace cokrig
