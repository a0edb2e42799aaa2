#pragma once

#include <stdexcept>
#include <string>

namespace ladder {

// Invalid arguments or parameters outside an operation's domain.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Quadrature, root finding or series evaluation failed to reach tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid or budget limits exceeded.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ladder
