#pragma once

#include <stdexcept>
#include <string>

namespace permsym {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (shape, dimension, range).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A combinatorial table would exceed its configured budget or the
/// platform integer range.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A quantity that is positive definite in exact arithmetic came out
/// singular or badly conditioned.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed external input (JSON channel files, cache files).
class ParseError : public Error {
public:
    using Error::Error;
};

namespace detail {
[[noreturn]] inline void throw_argument(const std::string& what) { throw ArgumentError(what); }
inline void require(bool ok, const std::string& what)
{
    if (!ok) throw ArgumentError(what);
}
}  // namespace detail

}  // namespace permsym
