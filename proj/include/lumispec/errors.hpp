#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lumispec {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, config contents or inputs. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A requested run budget violates a simulation precondition (dt, n_traj). CLI exit code 2.
class BudgetError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Numerical consistency failure (singular resolvent, unstable drift, complex residue). CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularResolventError : public NumericalError {
 public:
  SingularResolventError(const std::string& what, double omega) : NumericalError(what), omega_(omega) {}
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

/// Non-fatal diagnostics accumulated by operations that accept borderline inputs.
using Warnings = std::vector<std::string>;

}  // namespace lumispec
