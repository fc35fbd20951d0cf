#pragma once

#include <stdexcept>
#include <string>

namespace qgt {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A parameter set violates one of the integrality constraints of the
// ensemble. The message names the violated constraint.
struct DivisibilityError : Error {
    using Error::Error;
};

// Simple-graph repair exceeded its swap budget.
struct ConstructionError : Error {
    using Error::Error;
};

// Vector length does not match the graph dimensions.
struct DimensionError : Error {
    using Error::Error;
};

// A bound update produced L > U. This cannot happen for a correct
// noiseless syndrome; it signals corrupted input or an internal bug.
struct InconsistentSyndromeError : Error {
    using Error::Error;
};

// A threshold search found no success/failure sign change inside the
// probed interval.
struct NoBracketError : Error {
    using Error::Error;
};

} // namespace qgt
