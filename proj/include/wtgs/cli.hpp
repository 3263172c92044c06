#pragma once

#include <functional>

#include "wtgs/config.hpp"

namespace wtgs {

// Subcommand bodies. Each throws ConfigError / DataError / NumericalError on
// failure; run_guarded maps those to the exit-code contract.
int cmd_run(const RunConfig& cfg);
int cmd_compare(const RunConfig& cfg);
int cmd_oracle_check(const RunConfig& cfg);
int cmd_gen_data(const RunConfig& cfg);

// Executes a command body and maps exceptions to exit codes:
// ConfigError -> 2, DataError -> 3, NumericalError -> 4.
int run_guarded(const std::function<int()>& body);

}  // namespace wtgs
