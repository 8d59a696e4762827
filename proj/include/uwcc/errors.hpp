#pragma once

#include <stdexcept>
#include <string>

namespace uwcc {

// Bad inputs: unknown names, malformed files, out-of-range parameters.
// The CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown: division by zero in an integrand, non-finite residuals.
// The CLI maps this to exit code 3.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace uwcc
