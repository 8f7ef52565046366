#pragma once

#include <stdexcept>
#include <string>

namespace mlht {

/// Invalid user input: malformed problem definitions, misaligned regions,
/// empty sources, bad CLI/config values.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure in a solver: singular system, residual violation,
/// stalled source iteration, negative-flux abort.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Broken internal contract (size mismatch, non-nested grids). Indicates a
/// bug in calling code, not bad user input.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

} // namespace mlht
