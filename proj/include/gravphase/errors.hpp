#pragma once

#include <stdexcept>
#include <string>

namespace gravphase {

// Bad parameters, out-of-range arguments, inconsistent inputs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A solver hit a condition that makes its result meaningless: grid overflow,
// clipped support, collision of the masses, negative marginals.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gravphase
