#pragma once

#include <stdexcept>
#include <string>

namespace irrev {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A field was paired with a grid of different size.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// A user-supplied evaluator produced a non-finite value.
class NonFiniteValue : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A query outside the domain of a stored object (e.g. a time beyond the horizon).
class OutOfRange : public Error {
public:
    using Error::Error;
};

/// Input data violate a hypothesis that the computation requires.
class ValidationFailed : public Error {
public:
    using Error::Error;
};

}  // namespace irrev
