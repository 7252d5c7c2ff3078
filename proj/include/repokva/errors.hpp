#pragma once

#include <stdexcept>
#include <string>

namespace repokva {

// Malformed or inconsistent user input (bad config keys, out-of-range fields).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A solver or root finder failed to produce a finite answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace repokva
