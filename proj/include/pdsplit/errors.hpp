#pragma once

#include <stdexcept>
#include <string>

namespace pdsplit {

// Vector/matrix shapes disagree with a declared dimension.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Stepsizes or problem constants violate a feasibility constraint.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterate stopped being finite; carries the iteration index.
struct DivergenceError : std::runtime_error {
  long iteration;
  DivergenceError(long k, const std::string& what)
      : std::runtime_error(what), iteration(k) {}
};

// Malformed configuration or input file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pdsplit
