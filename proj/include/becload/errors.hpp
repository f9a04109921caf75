#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace becload {

// Tensor or basis size would exceed the configured memory budget.
class ResourceBudgetError : public std::runtime_error {
public:
  ResourceBudgetError(const std::string& what, double required_gib, double budget_gib)
      : std::runtime_error(what), required_gib(required_gib), budget_gib(budget_gib) {}
  double required_gib;
  double budget_gib;
};

// Non-diagonalizable (defective) matrix detected in the biorthogonal decomposition.
class DegeneracyError : public std::runtime_error {
public:
  DegeneracyError(const std::string& what, std::vector<std::complex<double>> clustered)
      : std::runtime_error(what), clustered_eigenvalues(std::move(clustered)) {}
  std::vector<std::complex<double>> clustered_eigenvalues;
};

// A time integral with a non-decaying exponent (zero decay rate configuration).
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Fock basis not closed under the requested operator action.
class ClosureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Integrator accuracy contract violated (e.g. trace deficit above threshold).
class AccuracyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Configuration file problem; carries the 1-based line number when known.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  int line;
};

}  // namespace becload
