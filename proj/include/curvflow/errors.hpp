#pragma once

#include <stdexcept>
#include <string>

namespace curvflow {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// process exit codes: ConfigError -> 2, RegimeError -> 3, NumericalError -> 4.

// Malformed or inconsistent user input: bad grid sizes, invalid exponents,
// curvature family / flow variant mismatches, unreadable config files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally valid input outside the parameter regime the method can
// handle, e.g. asking the stationary solver for an exponent range where the
// flow is not known to converge (or provably cannot).
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Breakdown at run time: NaN/Inf fields, loss of convexity or of the
// curvature-cone constraint, failed convex-hull recovery.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace curvflow
