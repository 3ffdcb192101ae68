#pragma once

#include <stdexcept>
#include <string>

namespace aroc {

// Input data / schema / model-reference problems. CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerical failures (factorization, bracketing, divergence).
// CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace aroc
