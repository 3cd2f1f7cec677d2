#pragma once

#include <stdexcept>
#include <string>

namespace traitlab {

// Bad inputs: schema violations, shape mismatches, precondition failures.
// The CLI maps these to exit code 2.
class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failures the computation cannot recover from: no variance,
// undefined statistics, non-finite activations, diverging training.
// The CLI maps these to exit code 3.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace traitlab
