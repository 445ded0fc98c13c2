#pragma once

#include <stdexcept>
#include <string>

namespace bigtoda {

/// Base for all workbench errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structural misuse: mismatched truncation orders, bad indices, bad config.
struct ConfigError : Error {
    using Error::Error;
};

/// An element that was required to be an exact x-derivative is not one.
/// Inversions in the hierarchy act only on provably exact elements, so this
/// signals a violated identity upstream, never a recoverable condition.
struct NotExactError : Error {
    using Error::Error;
};

/// A requested Lambda-order lies outside the window on which an operator is
/// known exactly.
struct WindowError : Error {
    using Error::Error;
};

/// No Lambda-order of an operator product is computable from the factors.
struct EmptyWindowError : WindowError {
    using WindowError::WindowError;
};

/// A symbol was expanded at z = 0 where it has a pole.
struct PoleAtZeroError : Error {
    using Error::Error;
};

/// The two Lax forms of a flow disagree on the tangent window.
struct InconsistentFlowError : Error {
    using Error::Error;
};

/// Two critical points of a lambda function collide within tolerance;
/// the caller should resample.
struct DegenerateCriticalError : Error {
    using Error::Error;
};

/// A numeric sample hit the singular locus p = q.
struct SingularSampleError : Error {
    using Error::Error;
};

} // namespace bigtoda
