#pragma once

#include <stdexcept>
#include <string>

namespace rblab {

// Raised when a computation fails numerically (negative circulant spectral
// coefficient, non-Hermitian discretization, inadequate inversion
// parameters, eigensolver failure). Kept distinct from std::invalid_argument
// so callers can map the two onto different exit codes.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rblab
