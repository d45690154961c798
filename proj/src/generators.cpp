#include "pdsplit/generators.hpp"

#include <cmath>
#include <stdexcept>

#include "pdsplit/errors.hpp"

namespace pdsplit {

Mat random_matrix(Eigen::Index rows, Eigen::Index cols, SplitMix64& rng) {
  Mat A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      A(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  return A;
}

Vec random_vector(Eigen::Index n, SplitMix64& rng) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

Mat random_rotation(Eigen::Index n, SplitMix64& rng) {
  Mat R = random_matrix(n, n, rng);
  Mat Q = Mat::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Vec v = R.col(k).tail(n - k);
    const double norm = v.norm();
    if (norm == 0.0) continue;
    // Reflect onto -sign(v0) * ||v|| * e1 for numerical stability.
    v[0] += (v[0] >= 0.0 ? norm : -norm);
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    R.bottomRightCorner(n - k, n - k) -=
        2.0 * v * (v.transpose() * R.bottomRightCorner(n - k, n - k));
    Q.rightCols(n - k) -= 2.0 * (Q.rightCols(n - k) * v) * v.transpose();
  }
  // Positive-diagonal convention for R makes Q unique.
  for (Eigen::Index k = 0; k < n; ++k) {
    if (R(k, k) < 0.0) Q.col(k) = -Q.col(k);
  }
  return Q;
}

namespace {

// Quadratic f with eigenvalues of the curvature matrix spread evenly over
// [0, conditioning] (so L_f = conditioning and mu_f = 0), in a random
// orientation, with a random linear tilt.
FunctionHandle make_smooth_term(Eigen::Index d_x, double conditioning,
                                SplitMix64& rng) {
  Vec lam(d_x);
  if (d_x == 1) {
    lam[0] = conditioning;
  } else {
    for (Eigen::Index i = 0; i < d_x; ++i) {
      lam[i] = conditioning * static_cast<double>(i) /
               static_cast<double>(d_x - 1);
    }
  }
  const Mat rot = random_rotation(d_x, rng);
  const Mat A = lam.cwiseSqrt().asDiagonal() * rot.transpose();
  Vec b = random_vector(d_x, rng);
  return FunctionHandle::quadratic(A, std::move(b));
}

FunctionHandle make_elastic_or_l1(Eigen::Index d_x,
                                  const GeneratorOptions& opts) {
  if (opts.mu_g > 0.0) {
    return FunctionHandle::elastic(opts.mu_g, opts.l1_weight, d_x);
  }
  return FunctionHandle::l1(opts.l1_weight, d_x);
}

// Draws K until lambda_min(K K^T) > 0; up to 10 attempts.
LinearMap draw_full_row_rank(Eigen::Index d_y, Eigen::Index d_x,
                             SplitMix64& rng) {
  for (int attempt = 0; attempt < 10; ++attempt) {
    LinearMap K(random_matrix(d_y, d_x, rng));
    if (spectral_summary(K).lambda_min > 0.0) return K;
  }
  throw InfeasibleError(
      "could not draw a full-row-rank K within 10 attempts");
}

}  // namespace

CompositeProblem generate_problem(Regime regime, Eigen::Index d_x,
                                  Eigen::Index d_y, std::uint64_t seed,
                                  double conditioning,
                                  const GeneratorOptions& opts) {
  if (d_x < 1) throw std::invalid_argument("generate_problem: d_x must be >= 1");
  if (!(conditioning > 0.0)) {
    throw std::invalid_argument("generate_problem: conditioning must be > 0");
  }
  if (opts.mu_g < 0.0 || !(opts.l1_weight > 0.0)) {
    throw std::invalid_argument("generate_problem: bad constants");
  }
  SplitMix64 rng(seed);
  FunctionHandle f = make_smooth_term(d_x, conditioning, rng);

  switch (regime) {
    case Regime::two_function: {
      return make_problem(std::move(f), make_elastic_or_l1(d_x, opts));
    }
    case Regime::smooth_h: {
      if (d_y < 1) {
        throw std::invalid_argument("generate_problem: d_y must be >= 1");
      }
      if (!(opts.mu_hstar > 0.0)) {
        throw std::invalid_argument("generate_problem: mu_hstar must be > 0");
      }
      FunctionHandle g = make_elastic_or_l1(d_x, opts);
      LinearMap K(random_matrix(d_y, d_x, rng));
      FunctionHandle h = FunctionHandle::scaled_sqnorm(
          1.0 / opts.mu_hstar, random_vector(d_y, rng));
      return make_problem(std::move(f), std::move(g), std::move(h),
                          std::move(K));
    }
    case Regime::nonsmooth_h:
    case Regime::linear_constraint: {
      if (d_y < 1 || d_y > d_x) {
        throw std::invalid_argument(
            "generate_problem: this regime requires 1 <= d_y <= d_x");
      }
      if (!(opts.mu_g > 0.0)) {
        throw std::invalid_argument(
            "generate_problem: this regime requires strongly convex g "
            "(mu_g > 0)");
      }
      FunctionHandle g =
          FunctionHandle::scaled_sqnorm(opts.mu_g, random_vector(d_x, rng));
      LinearMap K = draw_full_row_rank(d_y, d_x, rng);
      if (regime == Regime::nonsmooth_h) {
        FunctionHandle h = FunctionHandle::l1(opts.l1_weight, d_y);
        return make_problem(std::move(f), std::move(g), std::move(h),
                            std::move(K));
      }
      const Vec feasible = random_vector(d_x, rng);
      FunctionHandle h = FunctionHandle::indicator_point(K.apply(feasible));
      return make_problem(std::move(f), std::move(g), std::move(h),
                          std::move(K));
    }
  }
  throw std::invalid_argument("generate_problem: unknown regime");
}

}  // namespace pdsplit
