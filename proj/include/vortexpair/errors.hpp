#pragma once

#include <stdexcept>
#include <string>

namespace vortexpair {

// Base of every error the library raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs violate a documented precondition (bad config, bad arguments, mismatched grids).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The truncated computational window is too small for what the run needs.
class WindowExhaustion : public Error {
 public:
  using Error::Error;
};

// Numerical contract broken at run time (non-monotone ascent, NaN, CFL violation).
class NumericFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace vortexpair
