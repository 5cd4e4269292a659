#pragma once

#include <stdexcept>

namespace cellload {

// Requested SINR on a link with zero channel gain.
struct InvalidLinkError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Two training anchors coincide, so no finite Lipschitz constant exists.
struct DuplicateAnchorError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An iterative solver failed to produce a usable answer (eigensolver hit its
// iteration cap, the smoothing LP lost its way, ...).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Feasible-rate rejection sampling gave up: the configured rate range is
// essentially entirely infeasible for the scenario.
struct InfeasibleRangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pearson correlation of a constant sequence.
struct UndefinedCorrelationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cellload
