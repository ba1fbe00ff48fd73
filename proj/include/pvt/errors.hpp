#pragma once

#include <stdexcept>
#include <string>

namespace pvt {

/// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The sampling window is too small to certify an exact geometric result.
/// Callers discard the realization and draw a fresh one.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request would exceed the configured resource budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature or series evaluation failed to reach the requested accuracy.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two points of a pattern coincide; the realization is unusable.
class CoincidentPointsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}
}  // namespace detail

}  // namespace pvt
