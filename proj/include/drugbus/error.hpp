#pragma once

#include <stdexcept>
#include <string>

namespace drugbus {

/// Exception carrying a module-specific error code. Each module defines its
/// own code enum plus a `to_string(Code)` returning the machine-readable name.
template <typename Code>
class Error : public std::runtime_error {
 public:
  Error(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace drugbus
