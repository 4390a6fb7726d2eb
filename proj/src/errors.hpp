#pragma once

#include <stdexcept>
#include <string>

namespace uswg {

// Thrown for bad user input: malformed config, invalid parameters,
// unknown keys. Maps to process exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a computation fails numerically: non-convergence where
// convergence is required, norm drift past tolerance, NaN detected.
// Maps to process exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace uswg
