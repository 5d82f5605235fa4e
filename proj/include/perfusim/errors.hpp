#pragma once

#include <stdexcept>
#include <string>

namespace perfusim {

/// Mesh/surface input or consistency failure.
class MeshError : public std::runtime_error {
public:
    explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Linear or nonlinear solver failure; carries the last residual seen.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

/// Scenario configuration problem (missing file, inconsistent patches, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace perfusim
