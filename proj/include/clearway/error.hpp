#pragma once

#include <stdexcept>
#include <string>

namespace clearway {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate input to a geometric construction (collinear triangle, zero-length segment).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent obstacle input. `line` is 1-based, 0 when unknown.
class InputError : public Error {
public:
    explicit InputError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what)
        , line_(line)
    {}

    int line() const noexcept { return line_; }

private:
    int line_ = 0;
};

/// A mesh operation was called outside its contract (flip of a constrained edge, ...).
class MeshError : public Error {
public:
    using Error::Error;
};

/// A query that cannot be answered with the requested clearance.
class InfeasibleQuery : public Error {
public:
    using Error::Error;
};

/// An internal invariant does not hold. Always a bug or a precondition violated upstream.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

} // namespace clearway
