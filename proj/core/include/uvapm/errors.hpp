#pragma once

#include <stdexcept>
#include <string>

namespace uvapm {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Arguments violate a documented precondition (dimension mismatch,
// non-finite pixels, out-of-range coefficients, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Fewer samples than a build operation needs.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Requested basis rank exceeds what the data can support.
class InvalidRankError : public Error {
public:
    using Error::Error;
};

// Malformed or truncated file. Messages name the failing section and,
// for binary formats, the byte offset.
class FormatError : public Error {
public:
    using Error::Error;
};

// Inconsistent fit configuration (e.g. identity weight without a provider).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A photometric mask with no skin pixels selects nothing to fit against.
class EmptyMaskError : public Error {
public:
    using Error::Error;
};

// Optimizer received a non-finite gradient; the message names the group.
class OptimizerError : public Error {
public:
    using Error::Error;
};

// A fitting stage failed; the message names the stage and iteration.
class FitError : public Error {
public:
    using Error::Error;
};

} // namespace uvapm
