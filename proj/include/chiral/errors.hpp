#pragma once

#include <stdexcept>
#include <string>

namespace chiral {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The amplitude equations have no unique steady state (singular V).
class NoSteadyState : public Error {
public:
    NoSteadyState(const std::string& what, double smallest_singular_value)
        : Error(what), smallest_singular_value_(smallest_singular_value) {}
    double smallest_singular_value() const noexcept { return smallest_singular_value_; }

private:
    double smallest_singular_value_;
};

/// The master equation generator has a degenerate null space.
class NoUniqueSteadyState : public Error {
public:
    using Error::Error;
};

/// Time integration failed (step-size underflow, too many steps, non-finite state).
class IntegrationFailure : public Error {
public:
    using Error::Error;
};

/// T_p cannot be evaluated (zero total population, fewer than two atoms).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace chiral
