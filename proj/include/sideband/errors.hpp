#pragma once

#include <stdexcept>
#include <string>

namespace sideband {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid numeric input (negative rates, unnormalized states, ...).
struct DomainError : Error {
    using Error::Error;
};

// Both decay channels closed, or an otherwise singular steady-state problem.
struct DegenerateConfigError : Error {
    using Error::Error;
};

// Requested Fock/atom dimension exceeds the configured bound.
struct CapacityError : Error {
    using Error::Error;
};

// Operation not defined for this coupling kind.
struct UnsupportedModelError : Error {
    using Error::Error;
};

// Violated operation precondition (excitation count, trajectory count, ...).
struct PreconditionError : Error {
    using Error::Error;
};

// Integrator step size under- or overflow.
struct StepSizeError : Error {
    using Error::Error;
};

// Iterative solver failed to converge.
struct ConvergenceError : Error {
    using Error::Error;
};

// Steady state is not unique.
struct MultiplicityError : Error {
    using Error::Error;
};

// Config file problems, with position information for diagnostics.
struct ConfigParseError : Error {
    int line = 0;
    int column = 0;
    ConfigParseError(const std::string& msg, int line_, int column_ = 0)
        : Error("config:" + std::to_string(line_) + ":" + std::to_string(column_) + ": " + msg),
          line(line_),
          column(column_) {}
};

}  // namespace sideband
