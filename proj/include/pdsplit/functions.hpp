#pragma once

// Closed catalog of convex functions with value / gradient / prox /
// conjugate-prox access and Bregman divergence. Every algorithm and rate
// formula reads its constants from these handles; nothing is estimated.

#include <memory>
#include <optional>
#include <utility>

#include "pdsplit/linop.hpp"

namespace pdsplit {

// Smoothness constant L and strong convexity constant mu, with mu <= L.
struct SmoothProfile {
  double L = 0.0;
  double mu = 0.0;
};

enum class FuncKind {
  Quadratic,       // 0.5 * ||A x - b||^2
  ScaledSqNorm,    // (mu/2) * ||x - c||^2
  L1,              // lambda * ||x||_1
  ElasticReg,      // (mu/2) * ||x||^2 + lambda * ||x||_1
  IndicatorPoint,  // 0 at b, +inf elsewhere
  LinearFunc,      // <x, b>
  Zero             // 0
};

const char* to_string(FuncKind kind);

class FunctionHandle {
 public:
  // Profile computed at construction from the spectrum of A^T A.
  static FunctionHandle quadratic(Mat A, Vec b);
  static FunctionHandle scaled_sqnorm(double mu, Vec c);
  static FunctionHandle l1(double lambda, Eigen::Index dim);
  static FunctionHandle elastic(double mu, double lambda, Eigen::Index dim);
  static FunctionHandle indicator_point(Vec b);
  static FunctionHandle linear(Vec b);
  static FunctionHandle zero(Eigen::Index dim);

  FuncKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  bool smooth() const;

  // Present exactly for smooth kinds.
  const std::optional<SmoothProfile>& profile() const { return profile_; }

  // Strong convexity constant; defined for every kind (ElasticReg is strongly
  // convex without being smooth).
  double strong_convexity() const;

  double value(const Vec& x) const;  // +inf allowed (IndicatorPoint)
  Vec gradient(const Vec& x) const;  // throws for nonsmooth kinds
  Vec prox(double gamma, const Vec& v) const;
  Vec prox_conjugate(double gamma, const Vec& v) const;
  double bregman(const Vec& x, const Vec& y) const;  // smooth kinds only

  // Parameter access for structure-aware consumers (reference solver, KKT
  // residual). Only meaningful for the kinds that carry them.
  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }
  double mu_param() const { return mu_; }
  double lambda_param() const { return lambda_; }

  void attach_counter(std::shared_ptr<OracleCounts> counter) {
    counter_ = std::move(counter);
  }

 private:
  FunctionHandle() = default;

  FuncKind kind_ = FuncKind::Zero;
  Eigen::Index dim_ = 0;
  Mat A_;            // Quadratic
  Vec b_;            // Quadratic / IndicatorPoint / LinearFunc target, ScaledSqNorm center
  double mu_ = 0.0;      // ScaledSqNorm / ElasticReg
  double lambda_ = 0.0;  // L1 / ElasticReg
  std::optional<SmoothProfile> profile_;
  std::shared_ptr<OracleCounts> counter_;  // test instrumentation only
};

// Conjugate-prox through the Moreau decomposition
//   prox_{gamma F*}(v) = v - gamma * prox_{F/gamma}(v/gamma).
// Kept as an independent route from FunctionHandle::prox_conjugate so the two
// can be checked against each other.
Vec prox_conjugate_via_moreau(const FunctionHandle& F, double gamma,
                              const Vec& v);

// Euclidean distance from v to the subdifferential of F at x, in closed form
// per kind. For IndicatorPoint the stationarity set is unbounded at its point,
// so the feasibility violation ||x - b|| is reported instead.
double subgradient_distance(const FunctionHandle& F, const Vec& x,
                            const Vec& v);

// Strong convexity constant of the convex conjugate of a smooth handle:
// 1 / L. Throws for nonsmooth kinds and for L = 0.
double conjugate_strong_convexity(const FunctionHandle& F);

// F written as (1/2) w^T Q w - r^T w + const. Available exactly for the
// quadratic-family kinds (Quadratic, ScaledSqNorm, LinearFunc, Zero).
struct QuadraticForm {
  Mat Q;
  Vec r;
};
std::optional<QuadraticForm> as_quadratic_form(const FunctionHandle& F);

// Moves the strong convexity mu_f of f into g:
//   f~ = f - (mu_f/2) ||.||^2,   g~ = g + (mu_f/2) ||.||^2.
// Supported for origin-centered smooth terms (ScaledSqNorm with c = 0,
// Quadratic with A^T b = 0); g must stay representable in the catalog.
std::pair<FunctionHandle, FunctionHandle> transfer_strong_convexity(
    const FunctionHandle& f, const FunctionHandle& g);

}  // namespace pdsplit
