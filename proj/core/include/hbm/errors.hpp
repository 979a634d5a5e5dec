#pragma once

#include <stdexcept>

namespace hbm {

// Invalid user input: bad dimension, malformed body spec, out-of-range parameter.
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation could not proceed numerically: failed factorization,
// non-convergence, near-singular frame matrix.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sampled function is not resolvable on the given grid
// (interpolation residual above tolerance, basis degree too high).
struct resolution_error : numeric_error {
  using numeric_error::numeric_error;
};

// An internal self-check (defining relation, invariant) failed.
struct invariant_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hbm
