#pragma once

#include "config.hpp"

namespace kerrtraj::cli {

/// Dispatches on cfg.kind and writes the result file(s). Throws ConfigError /
/// ValidityError / TruncationError; the caller maps these to exit codes.
void run_experiment(const ExperimentConfig& cfg);

} // namespace kerrtraj::cli
