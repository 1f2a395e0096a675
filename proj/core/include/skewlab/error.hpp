#pragma once

#include <stdexcept>
#include <string>

namespace skewlab {

/// Malformed or inconsistent configuration (schema errors, failed validation).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A coordinate or scale value outside the computational window.
class DomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Numerical breakdown: a solver pivot vanished, a ratio is undefined, etc.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate an operation's precondition.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace skewlab
