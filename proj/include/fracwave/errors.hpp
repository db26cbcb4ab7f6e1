#pragma once

#include <stdexcept>
#include <string>

namespace fracwave {

// Invalid configuration, malformed input files, violated preconditions
// that a caller can fix by changing inputs. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical method failed: CFL violation, quadrature self-check,
// Picard non-contraction, CG stagnation treated as fatal. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// The mass coefficient 1 - 2*kappa*v dropped below the configured floor.
class DegeneracyError : public NumericalError {
public:
    DegeneracyError(const std::string& msg, double minimum, int space_index, int time_index)
        : NumericalError(msg), coefficient_min(minimum), node(space_index), step(time_index) {}
    double coefficient_min;
    int node;
    int step;
};

} // namespace fracwave
