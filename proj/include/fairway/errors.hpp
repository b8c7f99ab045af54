#pragma once

#include <stdexcept>
#include <string>

namespace fairway {

/// Base of every error raised by the toolkit. The CLI maps any `Error` to
/// exit code 2 (data or domain error).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (non-positive speed for a harmonic mean, k <= 0 for a log model, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A GNSS track violates its structural invariants.
class MalformedTrackError : public Error {
public:
    using Error::Error;
};

/// Not enough data to carry out a fit or a statistic.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// The least-squares problem has no unique solution (zero x-variance).
class DegenerateFitError : public Error {
public:
    using Error::Error;
};

/// K distinct centers cannot be formed from the supplied points.
class DegenerateClusteringError : public Error {
public:
    using Error::Error;
};

/// No density on the model's domain reaches the requested minimum speed.
class NoFeasibleDensityError : public Error {
public:
    using Error::Error;
};

/// A value object was constructed or loaded with broken invariants.
class InvariantViolationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. The message carries `file:line:column`.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A model document was written by an incompatible schema version.
class SchemaVersionError : public Error {
public:
    using Error::Error;
};

}  // namespace fairway
