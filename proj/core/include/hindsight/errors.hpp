#pragma once

#include <stdexcept>
#include <string>

namespace hindsight {

// Error families map to distinct CLI exit codes (see tools/).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, grids, levels, config files, unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (CSV schema, row contents).
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failures: invalid matrix entries, solver breakdown.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Power iteration ran out of iterations; carries the last residual seen.
class IterationLimitError : public NumericError {
 public:
  IterationLimitError(const std::string& what, double last_residual)
      : NumericError(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace hindsight
