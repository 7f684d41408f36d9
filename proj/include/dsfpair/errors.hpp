#pragma once

#include <stdexcept>
#include <string>

namespace dsfpair {

// Invalid physical input or violated type invariant.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration: schema violations, invalid grids, step-size
// preconditions. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (CLI exit code 3).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Spectral grid cannot represent the field (aliasing detected).
struct GridError : NumericError {
    explicit GridError(const std::string& msg) : NumericError(msg) {}
};

// Root bracketing failed in an iterative solver.
struct BracketError : NumericError {
    explicit BracketError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace dsfpair
