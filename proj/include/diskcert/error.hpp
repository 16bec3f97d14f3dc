#pragma once

#include <stdexcept>
#include <string>

namespace diskcert {

/// Raised on any contract violation: bad sizes, malformed files, non-finite data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

}  // namespace diskcert
