#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lsda {

/// Invalid input, inconsistent setup or a refused request. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values where finite ones are required.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver stopped before reaching its tolerance. Maps to CLI exit code 1.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, std::vector<double> residuals = {})
      : std::runtime_error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
  std::vector<double> residuals_;
};

/// Orbital occupations or orthonormality outside their admissible range.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace lsda
