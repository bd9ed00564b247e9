#pragma once

#include <stdexcept>
#include <string>

namespace sbm {

// Invalid argument or an estimator that is undefined for the given data.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The score denominator L^(2)(0) vanished, so alpha_n and the expansion are undefined.
class UndefinedEstimator : public DomainError {
 public:
  using DomainError::DomainError;
};

// Integrand does not decay (the Gaussian rate of the tail certificate is not positive).
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A side of the habitat path has too few same-sign steps to estimate its diffusivity.
class InsufficientData : public DomainError {
 public:
  using DomainError::DomainError;
};

// Quadrature did not reach the requested accuracy; carries the partial result.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double partial_value, double error_estimate)
      : std::runtime_error(what), partial_value_(partial_value), error_estimate_(error_estimate) {}

  double partial_value() const noexcept { return partial_value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double partial_value_;
  double error_estimate_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbm
