#pragma once

#include <stdexcept>
#include <string>

namespace finqa {

// Single error type for recoverable failures: bad input files, contract
// violations, provider failures. The CLI catches it at top level.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace finqa
