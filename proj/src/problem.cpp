#include "pdsplit/problem.hpp"

#include "pdsplit/errors.hpp"

namespace pdsplit {

namespace {

void check_x_side(const FunctionHandle& f, const FunctionHandle& g) {
  if (!f.smooth()) {
    throw std::invalid_argument("problem requires a smooth f");
  }
  if (!(f.profile()->L > 0.0)) {
    throw std::invalid_argument("problem requires f with L > 0");
  }
  if (f.dim() != g.dim()) {
    throw DimensionError("f and g must share the primal dimension");
  }
}

}  // namespace

CompositeProblem make_problem(FunctionHandle f, FunctionHandle g) {
  check_x_side(f, g);
  return CompositeProblem{std::move(f), std::move(g), std::nullopt,
                          std::nullopt, std::nullopt};
}

CompositeProblem make_problem(FunctionHandle f, FunctionHandle g,
                              FunctionHandle h, LinearMap K,
                              double spectral_tol) {
  check_x_side(f, g);
  if (K.cols() != f.dim()) {
    throw DimensionError("K cols must match the primal dimension");
  }
  if (K.rows() != h.dim()) {
    throw DimensionError("K rows must match h's dimension");
  }
  SpectralSummary spectral = spectral_summary(K, spectral_tol);
  return CompositeProblem{std::move(f), std::move(g), std::move(h),
                          std::move(K), std::move(spectral)};
}

}  // namespace pdsplit
