#pragma once

#include <stdexcept>
#include <string>

namespace lsmds {

/// Raised when inputs fail validation (bad files, inconsistent shapes,
/// out-of-range parameters). Maps to exit code 1 in the CLI.
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a numerical procedure cannot complete (non-convergence,
/// singular systems, disconnected inputs). Maps to exit code 2 in the CLI.
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lsmds
