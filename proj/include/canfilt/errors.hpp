#pragma once

#include <stdexcept>
#include <string>

namespace canfilt {

/// Thrown when a state, matrix, or error evaluation stops being finite.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace canfilt
