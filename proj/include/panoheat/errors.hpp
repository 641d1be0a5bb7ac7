#pragma once

#include <stdexcept>
#include <string>

namespace panoheat {

// Error taxonomy mirrored by the CLI exit codes: input = 1, numeric = 2, io = 3.

class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Stability violations, non-finite fields, log/exp domain failures.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace panoheat
