#pragma once

#include <stdexcept>
#include <string>

namespace unirigid {

/// Malformed or out-of-contract input (bad file, non-finite entries,
/// a y outside the spectrahedron where membership is required, ...).
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The framework is (n-1)-dimensional, so its Gale space is {0}.
class EmptyGaleSpace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two routes that must agree did not (e.g. both Farkas statements certified).
class InternalInconsistency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace unirigid
