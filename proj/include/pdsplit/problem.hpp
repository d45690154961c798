#pragma once

// Container for the composite objective f(x) + g(x) + h(Kx): the function
// handles, the operator, and its spectral summary.

#include <optional>

#include "pdsplit/functions.hpp"
#include "pdsplit/linop.hpp"

namespace pdsplit {

struct CompositeProblem {
  FunctionHandle f;  // smooth on the x space
  FunctionHandle g;  // proximable on the x space
  std::optional<FunctionHandle> h;  // conjugate-proximable on the y space
  std::optional<LinearMap> K;       // maps x space to y space
  std::optional<SpectralSummary> spectral;  // present iff K present

  Eigen::Index dx() const { return f.dim(); }
  Eigen::Index dy() const { return K ? K->rows() : 0; }
  bool primal_dual() const { return h.has_value(); }
};

// Validates dimensions and the h-iff-K pairing; computes the spectral summary.
CompositeProblem make_problem(FunctionHandle f, FunctionHandle g);
CompositeProblem make_problem(FunctionHandle f, FunctionHandle g,
                              FunctionHandle h, LinearMap K,
                              double spectral_tol = 1e-12);

}  // namespace pdsplit
