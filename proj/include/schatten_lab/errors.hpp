#pragma once

#include <stdexcept>
#include <string>

namespace schatten_lab {

// Thrown when an argument violates a documented precondition.
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical breakdown (e.g. eigensolver failure) with diagnostics in what().
struct numeric_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sampling/proposal budget ran out before the goal was reached.
struct budget_exhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A net or grid would exceed its cardinality cap.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Monte Carlo run produced no usable events.
struct degenerate_estimate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A greedy construction accepted no points at all.
struct empty_support : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver diverged; what() carries the residual trace.
struct diverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace schatten_lab
