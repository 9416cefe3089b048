#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specfrac {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller-supplied argument is out of its admissible range.
struct InvalidParameter : Error {
  using Error::Error;
};

/// Input to an operation that requires a zero-mean field has a nonzero mean.
struct ZeroMeanViolation : Error {
  using Error::Error;
};

/// The weight has (numerically) zero mean, so the constant mode cannot be
/// eliminated from the eigenvalue pencil.
struct ZeroMeanWeight : Error {
  using Error::Error;
};

/// The reduced pencil has no positive eigenvalue.
struct NoPositiveEigenvalue : Error {
  using Error::Error;
};

/// An iteration failed to reach its tolerance within the allowed budget.
struct NoConvergence : Error {
  using Error::Error;
};

/// A linear system was singular to working precision.
struct SingularSystem : Error {
  using Error::Error;
};

/// The requested steady-state branch does not exist for this weight.
struct NoPositiveSolution : Error {
  using Error::Error;
};

/// Continuation could not advance past lambda even with minimal steps.
struct BranchStall : Error {
  double last_good_lambda;
  BranchStall(const std::string& what, double lambda)
      : Error(what), last_good_lambda(lambda) {}
};

/// Malformed text input; position is the byte offset of the first bad char.
struct ParseError : Error {
  std::size_t position;
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

}  // namespace specfrac
