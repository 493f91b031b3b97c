#pragma once

#include <stdexcept>
#include <string>

namespace qpsa {

// Bad or inconsistent input (malformed instance, dimension mismatch, ...).
// CLI exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Operation refused because the instance exceeds a documented size cap.
// CLI exit code 3.
struct SizeLimitError : std::runtime_error {
  explicit SizeLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Guess enumeration would exceed the configured cap.
struct EnumerationCapError : std::runtime_error {
  explicit EnumerationCapError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace qpsa
