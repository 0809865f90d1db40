#pragma once

#include <stdexcept>
#include <string>

namespace gaic {

// Recoverable failures (invalid inputs, malformed files, degenerate numerics)
// are reported as gaic::Error. Messages name the offending input.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gaic
