#include "pdsplit/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdsplit/errors.hpp"

namespace pdsplit {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

void check_dim(const FunctionHandle& F, const Vec& x, const char* op) {
  if (x.size() != F.dim()) {
    throw DimensionError(std::string(op) + ": vector length " +
                         std::to_string(x.size()) + " does not match dim " +
                         std::to_string(F.dim()));
  }
}

}  // namespace

const char* to_string(FuncKind kind) {
  switch (kind) {
    case FuncKind::Quadratic: return "quadratic";
    case FuncKind::ScaledSqNorm: return "scaled_sqnorm";
    case FuncKind::L1: return "l1";
    case FuncKind::ElasticReg: return "elastic";
    case FuncKind::IndicatorPoint: return "indicator_point";
    case FuncKind::LinearFunc: return "linear";
    case FuncKind::Zero: return "zero";
  }
  return "?";
}

FunctionHandle FunctionHandle::quadratic(Mat A, Vec b) {
  if (A.rows() != b.size()) {
    throw DimensionError("quadratic: A rows must match b length");
  }
  FunctionHandle F;
  F.kind_ = FuncKind::Quadratic;
  F.dim_ = A.cols();
  F.A_ = std::move(A);
  F.b_ = std::move(b);
  // L = lambda_max(A^T A), mu = lambda_min(A^T A): the spectrum of A^T A is
  // the K K^T spectrum of the transposed map.
  LinearMap At(F.A_.transpose());
  SpectralSummary s = spectral_summary(At);
  F.profile_ = SmoothProfile{s.op_norm * s.op_norm, s.lambda_min};
  return F;
}

FunctionHandle FunctionHandle::scaled_sqnorm(double mu, Vec c) {
  if (!(mu > 0.0)) throw std::invalid_argument("scaled_sqnorm: mu must be positive");
  FunctionHandle F;
  F.kind_ = FuncKind::ScaledSqNorm;
  F.dim_ = c.size();
  F.b_ = std::move(c);
  F.mu_ = mu;
  F.profile_ = SmoothProfile{mu, mu};
  return F;
}

FunctionHandle FunctionHandle::l1(double lambda, Eigen::Index dim) {
  if (!(lambda > 0.0)) throw std::invalid_argument("l1: lambda must be positive");
  FunctionHandle F;
  F.kind_ = FuncKind::L1;
  F.dim_ = dim;
  F.lambda_ = lambda;
  return F;
}

FunctionHandle FunctionHandle::elastic(double mu, double lambda,
                                       Eigen::Index dim) {
  if (!(mu > 0.0) || !(lambda > 0.0)) {
    throw std::invalid_argument("elastic: mu and lambda must be positive");
  }
  FunctionHandle F;
  F.kind_ = FuncKind::ElasticReg;
  F.dim_ = dim;
  F.mu_ = mu;
  F.lambda_ = lambda;
  return F;
}

FunctionHandle FunctionHandle::indicator_point(Vec b) {
  FunctionHandle F;
  F.kind_ = FuncKind::IndicatorPoint;
  F.dim_ = b.size();
  F.b_ = std::move(b);
  return F;
}

FunctionHandle FunctionHandle::linear(Vec b) {
  FunctionHandle F;
  F.kind_ = FuncKind::LinearFunc;
  F.dim_ = b.size();
  F.b_ = std::move(b);
  F.profile_ = SmoothProfile{0.0, 0.0};
  return F;
}

FunctionHandle FunctionHandle::zero(Eigen::Index dim) {
  FunctionHandle F;
  F.kind_ = FuncKind::Zero;
  F.dim_ = dim;
  F.profile_ = SmoothProfile{0.0, 0.0};
  return F;
}

bool FunctionHandle::smooth() const { return profile_.has_value(); }

double FunctionHandle::strong_convexity() const {
  switch (kind_) {
    case FuncKind::Quadratic: return profile_->mu;
    case FuncKind::ScaledSqNorm: return mu_;
    case FuncKind::ElasticReg: return mu_;
    default: return 0.0;
  }
}

double FunctionHandle::value(const Vec& x) const {
  check_dim(*this, x, "value");
  switch (kind_) {
    case FuncKind::Quadratic: return 0.5 * (A_ * x - b_).squaredNorm();
    case FuncKind::ScaledSqNorm: return 0.5 * mu_ * (x - b_).squaredNorm();
    case FuncKind::L1: return lambda_ * x.lpNorm<1>();
    case FuncKind::ElasticReg:
      return 0.5 * mu_ * x.squaredNorm() + lambda_ * x.lpNorm<1>();
    case FuncKind::IndicatorPoint:
      return (x.array() == b_.array()).all()
                 ? 0.0
                 : std::numeric_limits<double>::infinity();
    case FuncKind::LinearFunc: return x.dot(b_);
    case FuncKind::Zero: return 0.0;
  }
  return 0.0;
}

Vec FunctionHandle::gradient(const Vec& x) const {
  check_dim(*this, x, "gradient");
  if (!smooth()) {
    throw std::logic_error(std::string("gradient unavailable for ") +
                           to_string(kind_));
  }
  if (counter_) ++counter_->grad;
  switch (kind_) {
    case FuncKind::Quadratic: return A_.transpose() * (A_ * x - b_);
    case FuncKind::ScaledSqNorm: return mu_ * (x - b_);
    case FuncKind::LinearFunc: return b_;
    case FuncKind::Zero: return Vec::Zero(dim_);
    default: break;
  }
  throw std::logic_error("unreachable");
}

Vec FunctionHandle::prox(double gamma, const Vec& v) const {
  check_dim(*this, v, "prox");
  if (!(gamma > 0.0)) throw std::invalid_argument("prox: gamma must be positive");
  if (counter_) ++counter_->prox;
  switch (kind_) {
    case FuncKind::Quadratic: {
      // (I + gamma A^T A) w = v + gamma A^T b
      Mat M = gamma * (A_.transpose() * A_);
      M.diagonal().array() += 1.0;
      return M.ldlt().solve(v + gamma * (A_.transpose() * b_));
    }
    case FuncKind::ScaledSqNorm:
      return (v + gamma * mu_ * b_) / (1.0 + gamma * mu_);
    case FuncKind::L1: {
      Vec w(dim_);
      for (Eigen::Index i = 0; i < dim_; ++i) {
        w[i] = soft_threshold(v[i], gamma * lambda_);
      }
      return w;
    }
    case FuncKind::ElasticReg: {
      Vec w(dim_);
      const double denom = 1.0 + gamma * mu_;
      for (Eigen::Index i = 0; i < dim_; ++i) {
        w[i] = soft_threshold(v[i], gamma * lambda_) / denom;
      }
      return w;
    }
    case FuncKind::IndicatorPoint: return b_;
    case FuncKind::LinearFunc: return v - gamma * b_;
    case FuncKind::Zero: return v;
  }
  throw std::logic_error("unreachable");
}

Vec FunctionHandle::prox_conjugate(double gamma, const Vec& v) const {
  check_dim(*this, v, "prox_conjugate");
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("prox_conjugate: gamma must be positive");
  }
  if (counter_) ++counter_->prox_conj;
  switch (kind_) {
    case FuncKind::ScaledSqNorm:
      // F*(y) = ||y||^2/(2 mu) + <y, c>
      return mu_ * (v - gamma * b_) / (mu_ + gamma);
    case FuncKind::L1: {
      // F* is the indicator of the inf-ball of radius lambda.
      Vec w(dim_);
      for (Eigen::Index i = 0; i < dim_; ++i) {
        w[i] = std::clamp(v[i], -lambda_, lambda_);
      }
      return w;
    }
    case FuncKind::IndicatorPoint: return v - gamma * b_;  // F* = <., b>
    case FuncKind::LinearFunc: return b_;                  // F* = indicator of {b}
    case FuncKind::Zero: return Vec::Zero(dim_);           // F* = indicator of {0}
    case FuncKind::Quadratic:
    case FuncKind::ElasticReg: {
      // No simpler closed form; use the Moreau decomposition inline.
      Vec inner = prox(1.0 / gamma, v / gamma);
      if (counter_) --counter_->prox;  // attribute the call to prox_conj only
      return v - gamma * inner;
    }
  }
  throw std::logic_error("unreachable");
}

double FunctionHandle::bregman(const Vec& x, const Vec& y) const {
  check_dim(*this, x, "bregman");
  check_dim(*this, y, "bregman");
  if (!smooth()) {
    throw std::logic_error(std::string("bregman unavailable for ") +
                           to_string(kind_));
  }
  // Closed forms: nonnegative by construction and immune to cancellation.
  switch (kind_) {
    case FuncKind::Quadratic: return 0.5 * (A_ * (x - y)).squaredNorm();
    case FuncKind::ScaledSqNorm: return 0.5 * mu_ * (x - y).squaredNorm();
    case FuncKind::LinearFunc:
    case FuncKind::Zero: return 0.0;
    default: break;
  }
  throw std::logic_error("unreachable");
}

Vec prox_conjugate_via_moreau(const FunctionHandle& F, double gamma,
                              const Vec& v) {
  return v - gamma * F.prox(1.0 / gamma, v / gamma);
}

double subgradient_distance(const FunctionHandle& F, const Vec& x,
                            const Vec& v) {
  switch (F.kind()) {
    case FuncKind::Quadratic:
      return (v - F.A().transpose() * (F.A() * x - F.b())).norm();
    case FuncKind::ScaledSqNorm:
      return (v - F.mu_param() * (x - F.b())).norm();
    case FuncKind::LinearFunc: return (v - F.b()).norm();
    case FuncKind::Zero: return v.norm();
    case FuncKind::L1: {
      const double lam = F.lambda_param();
      double sq = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        double d;
        if (x[i] > 0.0) {
          d = v[i] - lam;
        } else if (x[i] < 0.0) {
          d = v[i] + lam;
        } else {
          d = std::max(0.0, std::abs(v[i]) - lam);
        }
        sq += d * d;
      }
      return std::sqrt(sq);
    }
    case FuncKind::ElasticReg: {
      const double lam = F.lambda_param();
      const double mu = F.mu_param();
      double sq = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double r = v[i] - mu * x[i];
        double d;
        if (x[i] > 0.0) {
          d = r - lam;
        } else if (x[i] < 0.0) {
          d = r + lam;
        } else {
          d = std::max(0.0, std::abs(r) - lam);
        }
        sq += d * d;
      }
      return std::sqrt(sq);
    }
    case FuncKind::IndicatorPoint:
      // At b the subdifferential is the whole space; report feasibility.
      return (x - F.b()).norm();
  }
  return 0.0;
}

double conjugate_strong_convexity(const FunctionHandle& F) {
  if (!F.smooth()) {
    throw std::logic_error("conjugate_strong_convexity requires a smooth handle");
  }
  const double L = F.profile()->L;
  if (!(L > 0.0)) {
    throw std::logic_error("conjugate_strong_convexity requires L > 0");
  }
  return 1.0 / L;
}

std::optional<QuadraticForm> as_quadratic_form(const FunctionHandle& F) {
  const Eigen::Index n = F.dim();
  switch (F.kind()) {
    case FuncKind::Quadratic:
      return QuadraticForm{F.A().transpose() * F.A(),
                           F.A().transpose() * F.b()};
    case FuncKind::ScaledSqNorm:
      return QuadraticForm{F.mu_param() * Mat::Identity(n, n),
                           F.mu_param() * F.b()};
    case FuncKind::LinearFunc:
      return QuadraticForm{Mat::Zero(n, n), (-F.b()).eval()};
    case FuncKind::Zero:
      return QuadraticForm{Mat::Zero(n, n), Vec::Zero(n)};
    default:
      return std::nullopt;
  }
}

std::pair<FunctionHandle, FunctionHandle> transfer_strong_convexity(
    const FunctionHandle& f, const FunctionHandle& g) {
  if (!f.smooth()) {
    throw std::logic_error("transfer requires a smooth f");
  }
  const double mu_f = f.strong_convexity();
  if (!(mu_f > 0.0)) throw std::logic_error("nothing to transfer");
  if (f.dim() != g.dim()) {
    throw DimensionError("transfer: f and g dimensions differ");
  }
  const Eigen::Index n = f.dim();

  FunctionHandle f_new = FunctionHandle::zero(n);
  switch (f.kind()) {
    case FuncKind::ScaledSqNorm: {
      if (f.b().norm() != 0.0) {
        throw std::logic_error(
            "transfer requires an origin-centered smooth term");
      }
      // (mu/2)||x||^2 minus its full curvature leaves zero.
      f_new = FunctionHandle::zero(n);
      break;
    }
    case FuncKind::Quadratic: {
      if ((f.A().transpose() * f.b()).norm() >
          1e-12 * (1.0 + f.b().norm()) * (1.0 + f.A().norm())) {
        throw std::logic_error(
            "transfer requires an origin-centered smooth term");
      }
      Mat M = f.A().transpose() * f.A();
      M.diagonal().array() -= mu_f;
      SymEigen eig = jacobi_eigen(M);
      Mat root = Mat::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double lam = std::max(eig.values[i], 0.0);
        root += std::sqrt(lam) * eig.vectors.col(i) *
                eig.vectors.col(i).transpose();
      }
      f_new = FunctionHandle::quadratic(root, Vec::Zero(n));
      break;
    }
    default:
      throw std::logic_error("transfer supports quadratic-family f only");
  }

  FunctionHandle g_new = FunctionHandle::zero(n);
  switch (g.kind()) {
    case FuncKind::Zero:
      g_new = FunctionHandle::scaled_sqnorm(mu_f, Vec::Zero(n));
      break;
    case FuncKind::L1:
      g_new = FunctionHandle::elastic(mu_f, g.lambda_param(), n);
      break;
    case FuncKind::ScaledSqNorm:
      if (g.b().norm() != 0.0) {
        throw std::logic_error("transfer requires an origin-centered g");
      }
      g_new = FunctionHandle::scaled_sqnorm(g.mu_param() + mu_f, Vec::Zero(n));
      break;
    case FuncKind::ElasticReg:
      g_new = FunctionHandle::elastic(g.mu_param() + mu_f, g.lambda_param(), n);
      break;
    default:
      throw std::logic_error("transfer cannot absorb curvature into this g");
  }
  return {std::move(f_new), std::move(g_new)};
}

}  // namespace pdsplit
