#pragma once

#include <stdexcept>
#include <string>

namespace qtakagi {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Permutation image table repeats or leaves out a digit.
struct NotABijection : Error {
  using Error::Error;
};

// sigma^q != id; carries the smallest digit where the composition fails.
struct OrderViolation : Error {
  int failing_point;
  OrderViolation(const std::string& msg, int point)
      : Error(msg), failing_point(point) {}
};

// A dense table of size q^m would exceed the global cap (2^20 entries),
// or a point level is too deep for exact 64-bit indexing.
struct LevelCapExceeded : Error {
  using Error::Error;
};

// A derivative-order multi-index with |u| = 0 where |u| >= 1 is required.
struct EmptyMultiIndex : Error {
  using Error::Error;
};

// Tuple enumeration would exceed the configured work limit.
struct CombinatorialGuard : Error {
  using Error::Error;
};

// Malformed user-facing configuration (CLI flags, JSON config, weights).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qtakagi
