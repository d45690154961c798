#pragma once

#include <cstdint>

#include "pdsplit/prng.hpp"
#include "pdsplit/problem.hpp"
#include "pdsplit/stepsizes.hpp"

namespace pdsplit {

// Constants baked into generated instances. These are benchmark choices, not
// quantities under test; every value is recorded exactly in the handles.
struct GeneratorOptions {
  double mu_g = 1.0;      // strong convexity given to g (0 allowed only where
                          // a merely-convex g is admissible)
  double mu_hstar = 1.0;  // strong convexity of h* in the smooth regime
  double l1_weight = 0.1; // weight of every l1 term
};

// Filled with uniform [-1, 1) entries drawn row-major from rng.
Mat random_matrix(Eigen::Index rows, Eigen::Index cols, SplitMix64& rng);
Vec random_vector(Eigen::Index n, SplitMix64& rng);

// Orthonormal matrix from the Householder QR of a random square matrix,
// with the sign convention that makes the factorization unique. Hand-rolled
// so the result is bit-identical across platforms.
Mat random_rotation(Eigen::Index n, SplitMix64& rng);

// Seeded instances realizing each regime's hypotheses:
//   two_function:      f quadratic with curvature spread [0, conditioning],
//                      g elastic-net (mu_g, l1_weight);
//   smooth_h:          the same primal pair plus h = scaled squared norm with
//                      conjugate strong convexity mu_hstar, dense random K;
//   nonsmooth_h:       smooth strongly convex g (scaled squared norm), h = l1,
//                      K full row rank (verified; up to 10 redraws);
//   linear_constraint: h pins Kx to b = K * (random point), so b lies in the
//                      range of K; K full row rank as above.
// Requires d_x >= 1; the primal-dual regimes require d_y >= 1 and the
// full-row-rank regimes d_y <= d_x.
CompositeProblem generate_problem(Regime regime, Eigen::Index d_x,
                                  Eigen::Index d_y, std::uint64_t seed,
                                  double conditioning,
                                  const GeneratorOptions& opts = {});

}  // namespace pdsplit
