#pragma once

#include <stdexcept>
#include <string>

namespace edm {

// Structural problems: mismatched dimensions, out-of-range indices.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameter values (non-positive capacitance, empty grids, ...).
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure: singular matrices, non-physical density matrices.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A basis cutoff could not be increased far enough to converge.
struct CutoffError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative eigensolver ran out of restarts.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configured resource budget (memory) would be exceeded.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent run configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace edm
