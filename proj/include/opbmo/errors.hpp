#pragma once

#include <stdexcept>

namespace opbmo {

/// File and parse failures; mapped to exit code 3 by the CLI.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite values or failed solver convergence; mapped to exit code 1.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace opbmo
