#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wtgs {

// Configuration problems: bad flags, unknown config keys, invalid hyperparameters.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input-data problems: unreadable or malformed CSV, inconsistent shapes.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Floating-point breakdowns: failed factorizations, non-positive quadratic forms.
struct NumericalError : std::runtime_error {
  std::size_t gamma_size = 0;  // |gamma| of the offending state
  double min_pivot = 0.0;      // smallest pivot / offending quantity, when applicable
  long long iteration = -1;    // sampler iteration, when applicable

  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
  NumericalError(const std::string& msg, std::size_t k, double pivot)
      : std::runtime_error(msg), gamma_size(k), min_pivot(pivot) {}
};

// Process exit codes shared by the command-line driver and the tests.
enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 2,
  exit_data_error = 3,
  exit_numerical_error = 4,
  exit_oracle_failure = 5,
};

}  // namespace wtgs
