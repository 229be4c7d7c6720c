#pragma once

#include <stdexcept>
#include <string>

namespace spikebench {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Root finding, quadrature or an iteration failed to deliver a finite answer.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Series coefficients grew past the cancellation guard.
struct InstabilityError : NumericalError {
  InstabilityError(const std::string& what, int order_) : NumericalError(what), order(order_) {}
  int order;
};

struct ConvergenceError : NumericalError {
  ConvergenceError(const std::string& what, double residual_)
      : NumericalError(what), residual(residual_) {}
  double residual;
};

struct DivergenceError : NumericalError {
  DivergenceError(const std::string& what, int iteration_)
      : NumericalError(what), iteration(iteration_) {}
  int iteration;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spikebench
