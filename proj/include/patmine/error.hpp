#pragma once

#include <stdexcept>
#include <string>

namespace patmine {

// Bad command line / configuration.  CLI maps this to exit code 1.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Missing or malformed input data.  CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace patmine
