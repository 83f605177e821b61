#pragma once

#include <stdexcept>
#include <string>

namespace gpcert {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two vectors that must share a dimension do not.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A scalar argument lies outside the mathematically admissible range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The gram matrix (plus jitter) is not positive definite.
class SingularGramError : public Error {
public:
    SingularGramError(const std::string& what, int pivot)
        : Error(what), pivot_(pivot) {}
    /// Index of the first pivot that failed during factorization.
    int pivot() const noexcept { return pivot_; }

private:
    int pivot_;
};

/// A pair of points that must be distinct coincide.
class DegeneratePairError : public Error {
public:
    using Error::Error;
};

/// The two-point variance evaluated to a negative value beyond round-off.
class NonPositiveSigmaError : public Error {
public:
    using Error::Error;
};

/// A file could not be parsed; carries the 1-based offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

/// Invalid run configuration (CLI arguments, sweep config, generator params).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace gpcert
