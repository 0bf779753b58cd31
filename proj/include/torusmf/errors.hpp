#pragma once

#include <stdexcept>
#include <string>

namespace torusmf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments: wrong grid size, mismatched shapes, unknown presets.
struct InvalidArgument : Error {
  using Error::Error;
};

// exp(u) would leave the representable range (max u > 700).
struct OverflowError : Error {
  using Error::Error;
};

// An iterative solve or eigensolve ran out of iterations.
struct ConvergenceError : Error {
  using Error::Error;
};

// The right-hand side of a singular solve has a component along the kernel.
struct SolvabilityError : Error {
  using Error::Error;
};

}  // namespace torusmf
