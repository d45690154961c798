#pragma once

// Brute-force oracles used by the test suites. Each routine is an independent
// route to a quantity the library computes in closed form; none of them call
// the code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pdsplit/functions.hpp"
#include "pdsplit/linop.hpp"
#include "pdsplit/problem.hpp"

namespace oracles {

using pdsplit::Mat;
using pdsplit::Vec;

// argmin over w of F(w) + (1/2 gamma) (w - v)^2 for a scalar convex F, by a
// dense grid pass (which also handles F taking +inf off its domain) followed
// by ternary refinement around the best finite grid point.
inline double prox_1d(const std::function<double(double)>& F, double gamma,
                      double v, double radius,
                      const std::vector<double>& extra_candidates = {}) {
  const auto objective = [&](double w) {
    const double fw = F(w);
    if (!std::isfinite(fw)) return std::numeric_limits<double>::infinity();
    return fw + (w - v) * (w - v) / (2.0 * gamma);
  };

  const int grid_points = 4001;
  const double lo = v - radius;
  const double hi = v + radius;
  const double step = (hi - lo) / (grid_points - 1);
  double best_w = v;
  double best_val = objective(v);
  for (int i = 0; i < grid_points; ++i) {
    const double w = lo + i * step;
    const double val = objective(w);
    if (val < best_val) {
      best_val = val;
      best_w = w;
    }
  }
  // Isolated domain points (indicators) can never be hit by the grid; they
  // are supplied explicitly.
  for (double w : extra_candidates) {
    const double val = objective(w);
    if (val < best_val) {
      best_val = val;
      best_w = w;
    }
  }

  double a = best_w - step;
  double b = best_w + step;
  if (!std::isfinite(objective(a)) && !std::isfinite(objective(b))) {
    return best_w;  // isolated domain point (e.g. an indicator)
  }
  for (int it = 0; it < 300; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (objective(m1) <= objective(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return 0.5 * (a + b);
}

// Componentwise central difference of a smooth F at x.
inline Vec central_difference_gradient(const pdsplit::FunctionHandle& F,
                                       const Vec& x, double h = 1e-5) {
  Vec grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x;
    Vec xm = x;
    xp[i] += h;
    xm[i] -= h;
    grad[i] = (F.value(xp) - F.value(xm)) / (2.0 * h);
  }
  return grad;
}

// Spectral quantities through Eigen's dense decompositions, with the same
// zero threshold the library applies.
struct SpectralOracle {
  double op_norm = 0.0;
  double lambda_min = 0.0;
  std::optional<double> lambda_min_pos;
};

inline SpectralOracle spectral_oracle(const Mat& K) {
  SpectralOracle out;
  Eigen::JacobiSVD<Mat> svd(K);
  out.op_norm = K.size() == 0 ? 0.0 : svd.singularValues()(0);

  const Mat gram = K * K.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  const Vec values = eig.eigenvalues();  // ascending
  const double threshold =
      out.op_norm * out.op_norm *
      pdsplit::zero_threshold_scale(K.rows(), K.cols());
  double lam_min = values(0);
  if (lam_min < threshold) lam_min = 0.0;
  out.lambda_min = lam_min;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) > threshold) {
      out.lambda_min_pos = values(i);
      break;
    }
  }
  return out;
}

// KKT residual recomputed from scratch: every ingredient (gradients,
// subdifferential distances, conjugate proxes, range projector) is hand-coded
// here from the defining formulas rather than taken from the library.
// Supports the function kinds the generated problems use. gamma = 1.
inline Vec hand_gradient_f(const pdsplit::FunctionHandle& f, const Vec& z) {
  using pdsplit::FuncKind;
  switch (f.kind()) {
    case FuncKind::Quadratic:
      return f.A().transpose() * (f.A() * z - f.b());
    case FuncKind::ScaledSqNorm:
      return f.mu_param() * (z - f.b());
    default:
      throw std::logic_error("hand_gradient_f: unsupported f kind");
  }
}

inline double hand_subdiff_distance_g(const pdsplit::FunctionHandle& g,
                                      const Vec& x, const Vec& w) {
  using pdsplit::FuncKind;
  double sq = 0.0;
  switch (g.kind()) {
    case FuncKind::Zero:
      return w.norm();
    case FuncKind::ScaledSqNorm:
      return (w - g.mu_param() * (x - g.b())).norm();
    case FuncKind::L1:
    case FuncKind::ElasticReg: {
      const double mu =
          g.kind() == FuncKind::ElasticReg ? g.mu_param() : 0.0;
      const double lam = g.lambda_param();
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double r = w[i] - mu * x[i];
        double d;
        if (x[i] > 0.0) {
          d = r - lam;
        } else if (x[i] < 0.0) {
          d = r + lam;
        } else {
          d = std::max(std::abs(r) - lam, 0.0);
        }
        sq += d * d;
      }
      return std::sqrt(sq);
    }
    default:
      throw std::logic_error("hand_subdiff_distance_g: unsupported g kind");
  }
}

inline double scripted_kkt(const pdsplit::CompositeProblem& problem,
                           const Vec& x, const std::optional<Vec>& y,
                           const Vec& z) {
  using pdsplit::FuncKind;
  double total = 0.0;

  // Stationarity: distance of -K^T y - grad f(z) to the subdifferential of g.
  Vec w = -hand_gradient_f(problem.f, z);
  if (problem.K && y) w -= problem.K->matrix().transpose() * (*y);
  const double stat = hand_subdiff_distance_g(problem.g, x, w);
  total += stat * stat;

  // Dual feasibility: || y - prox_{h*}(y + K x) || at gamma = 1, with the
  // conjugate prox written out per kind.
  if (problem.h && problem.K && y) {
    const Vec arg = *y + problem.K->matrix() * x;
    Vec back;
    switch (problem.h->kind()) {
      case FuncKind::ScaledSqNorm: {
        const double mu = problem.h->mu_param();
        back = mu * (arg - problem.h->b()) / (mu + 1.0);
        break;
      }
      case FuncKind::L1: {
        const double lam = problem.h->lambda_param();
        back = arg.cwiseMax(-lam).cwiseMin(lam);
        break;
      }
      case FuncKind::IndicatorPoint:
        back = arg - problem.h->b();
        break;
      default:
        throw std::logic_error("scripted_kkt: unsupported h kind");
    }
    total += (*y - back).squaredNorm();

    if (problem.h->kind() == FuncKind::IndicatorPoint) {
      // Distance of y to ran(K), projector built from the SVD of K.
      const Mat K = problem.K->matrix();
      Eigen::JacobiSVD<Mat> svd(K, Eigen::ComputeThinU);
      const double tol = svd.singularValues()(0) *
                         std::sqrt(pdsplit::zero_threshold_scale(
                             K.rows(), K.cols()));
      Eigen::Index rank = 0;
      while (rank < svd.singularValues().size() &&
             svd.singularValues()(rank) > tol) {
        ++rank;
      }
      const Mat U = svd.matrixU().leftCols(rank);
      total += (*y - U * (U.transpose() * (*y))).squaredNorm();
    }
  }

  // Anchor consistency.
  total += (x - z).squaredNorm();
  return std::sqrt(total);
}

}  // namespace oracles
