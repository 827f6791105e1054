#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfair {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data: schema violations, malformed CSV cells, invalid distributions.
class DataError : public Error {
public:
    using Error::Error;
};

// A happiness function could not be evaluated (missing feature, division by zero, ...).
class EvalError : public Error {
public:
    using Error::Error;
};

// Caller passed arguments outside an operation's domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// The LP solver returned something that cannot be trusted.
class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace hfair
