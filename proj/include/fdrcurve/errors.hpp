#pragma once

#include <stdexcept>
#include <string>

namespace fdrcurve {

/// Raised when an input file is missing, malformed, or fails validation.
/// Distinct from std::domain_error (bad arguments) so callers can map the
/// two classes to different exit codes.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fdrcurve
