#pragma once

#include <stdexcept>
#include <string>

namespace ptlearn {

// Bad user input: malformed files, inconsistent dimensions, invalid flags.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: non-finite statistics, failed optimization.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ptlearn
