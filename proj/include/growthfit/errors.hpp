#pragma once

#include <stdexcept>
#include <string>

namespace growthfit {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (bad CSV row, non-numeric cell, bad header).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a data invariant
/// (duplicate year, non-positive value, inconsistent arguments).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A requested key (e.g. a Maddison row label) does not exist.
class LookupError : public Error {
public:
    using Error::Error;
};

/// The requested analysis cannot be carried out on this data:
/// degenerate fit input, no feasible partition, too few observations.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Evaluation at or beyond the singularity of a fitted hyperbola.
class SingularityError : public Error {
public:
    using Error::Error;
};

} // namespace growthfit
