#pragma once

#include <stdexcept>
#include <string>

namespace gct {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or non-finite input data.
struct InputError : Error {
    using Error::Error;
};

// API misuse: mismatched manifolds, too few samples, wrong manifold kind.
struct UsageError : Error {
    using Error::Error;
};

// Numerical failure: eigenvalue below floor, singular metric, singular solve.
struct ConditioningError : Error {
    using Error::Error;
};

} // namespace gct
