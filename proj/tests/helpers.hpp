#pragma once

// Shared instance builders for the test suites.

#include <cstdint>
#include <optional>

#include "pdsplit/generators.hpp"
#include "pdsplit/prng.hpp"
#include "pdsplit/problem.hpp"
#include "pdsplit/solvers.hpp"
#include "pdsplit/stepsizes.hpp"

namespace helpers {

using pdsplit::CompositeProblem;
using pdsplit::FunctionHandle;
using pdsplit::LinearMap;
using pdsplit::Mat;
using pdsplit::SplitMix64;
using pdsplit::StepSizes;
using pdsplit::Vec;

inline Vec vec1(double v) {
  Vec x(1);
  x[0] = v;
  return x;
}

inline Mat mat1(double v) {
  Mat A(1, 1);
  A(0, 0) = v;
  return A;
}

// f(x) = x^2/2, g = 0, h = (1/2) y^2 through K = identity on R^1. The scalar
// instance behind the frozen step-through values: prox of g is the identity
// and prox_{gamma h*}(v) = v / (1 + gamma).
inline CompositeProblem scalar_pd_problem() {
  return pdsplit::make_problem(
      FunctionHandle::quadratic(mat1(1.0), vec1(0.0)),
      FunctionHandle::zero(1), FunctionHandle::scaled_sqnorm(1.0, vec1(0.0)),
      LinearMap(mat1(1.0)));
}

// f(x) = x^2/2, g = 0 on R^1.
inline CompositeProblem scalar_tf_problem() {
  return pdsplit::make_problem(
      FunctionHandle::quadratic(mat1(1.0), vec1(0.0)),
      FunctionHandle::zero(1));
}

inline StepSizes steps(double eta_x, std::optional<double> eta_y,
                       double eta_z,
                       pdsplit::Regime regime = pdsplit::Regime::smooth_h) {
  StepSizes ss;
  ss.eta_x = eta_x;
  ss.eta_y = eta_y;
  ss.eta_z = eta_z;
  ss.regime = regime;
  return ss;
}

inline StepSizes all_half_steps() {
  return steps(0.5, 0.5, 0.5);
}

// Rank-deficient wide operator: a product of d_y x r and r x d_x factors has
// rank at most r, so K K^T (d_y x d_y, r < d_y) has lambda_min = 0 while its
// smallest positive eigenvalue stays well above the zero threshold.
inline Mat rank_deficient_matrix(Eigen::Index d_y, Eigen::Index r,
                                 Eigen::Index d_x, SplitMix64& rng) {
  const Mat B = pdsplit::random_matrix(d_y, r, rng);
  const Mat C = pdsplit::random_matrix(r, d_x, rng);
  return B * C;
}

// Linearly constrained instance with a rank-deficient K and a consistent
// right-hand side b = K x_feas. Quadratic-family f and g so the reference
// solver can take the direct saddle route.
inline CompositeProblem constrained_rank_deficient(std::uint64_t seed,
                                                   Eigen::Index d_x = 12,
                                                   Eigen::Index d_y = 6,
                                                   Eigen::Index r = 3) {
  SplitMix64 rng(seed);
  const Mat A = pdsplit::random_matrix(d_x, d_x, rng) / 3.0;
  const Vec bf = pdsplit::random_vector(d_x, rng);
  const Mat K = rank_deficient_matrix(d_y, r, d_x, rng);
  const Vec x_feas = pdsplit::random_vector(d_x, rng);
  const Vec c = pdsplit::random_vector(d_x, rng);
  return pdsplit::make_problem(
      FunctionHandle::quadratic(A, bf),
      FunctionHandle::scaled_sqnorm(1.0, c),
      FunctionHandle::indicator_point(K * x_feas), LinearMap(K));
}

}  // namespace helpers
