#pragma once

#include <stdexcept>
#include <string>

namespace bsns {

// exit code 1
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct grid_mismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// exit code 2
struct numerical_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exit code 3
struct non_convergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bsns
