#pragma once

#include <stdexcept>
#include <string>

namespace vdtk {

// Bad arguments, malformed configs/specs, unusable parameter combinations.
// The CLI maps this to exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally or numerically invalid data: dimension mismatches, corrupt
// payloads, degenerate inputs. The CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public DataError {
 public:
  explicit IoError(const std::string& msg) : DataError(msg) {}
};

}  // namespace vdtk
