#include "pdsplit/linop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "pdsplit/errors.hpp"
#include "pdsplit/prng.hpp"

namespace pdsplit {

namespace {
constexpr std::uint64_t kPowerStartSeed = 0x0123456789ABCDEFULL;
constexpr int kPowerMaxIters = 10000;
constexpr int kJacobiMaxSweeps = 100;
}  // namespace

LinearMap::LinearMap(Mat A) : A_(std::move(A)) {
  if (A_.rows() < 1 || A_.cols() < 1) {
    throw DimensionError("LinearMap requires at least one row and column");
  }
}

Vec LinearMap::apply(const Vec& x) const {
  if (x.size() != A_.cols()) {
    throw DimensionError("apply: vector length " + std::to_string(x.size()) +
                         " does not match cols " + std::to_string(A_.cols()));
  }
  if (counter_) ++counter_->k_apply;
  return A_ * x;
}

Vec LinearMap::apply_adjoint(const Vec& y) const {
  if (y.size() != A_.rows()) {
    throw DimensionError("apply_adjoint: vector length " +
                         std::to_string(y.size()) + " does not match rows " +
                         std::to_string(A_.rows()));
  }
  if (counter_) ++counter_->k_adjoint;
  return A_.transpose() * y;
}

double zero_threshold_scale(Eigen::Index rows, Eigen::Index cols) {
  return std::numeric_limits<double>::epsilon() *
         static_cast<double>(std::max(rows, cols)) * 64.0;
}

SymEigen jacobi_eigen(const Mat& S) {
  if (S.rows() != S.cols()) {
    throw DimensionError("jacobi_eigen requires a square matrix");
  }
  const Eigen::Index n = S.rows();
  Mat A = 0.5 * (S + S.transpose());  // enforce exact symmetry
  Mat V = Mat::Identity(n, n);
  const double scale = std::max(A.norm(), 1e-300);
  const double stop = std::numeric_limits<double>::epsilon() * scale;

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (std::sqrt(2.0 * off) <= stop) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double app = A(p, p);
        const double aqq = A(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        double t;
        if (tau >= 0.0) {
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        } else {
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        A(p, p) = app - t * apq;
        A(q, q) = aqq + t * apq;
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = A(i, p);
          const double aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(p, i) = A(i, p);
          A(i, q) = s * aip + c * aiq;
          A(q, i) = A(i, q);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vip = V(i, p);
          const double viq = V(i, q);
          V(i, p) = c * vip - s * viq;
          V(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  // Sort ascending, carrying eigenvectors along.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&A](Eigen::Index a, Eigen::Index b) { return A(a, a) < A(b, b); });
  SymEigen out;
  out.values = Vec(n);
  out.vectors = Mat(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = order[static_cast<std::size_t>(i)];
    out.values[i] = A(j, j);
    out.vectors.col(i) = V.col(j);
  }
  return out;
}

namespace {

// Largest eigenvalue of K^T K by power iteration with a fixed pseudo-random
// start vector; returns 0 for the zero map.
double power_lambda_max(const Mat& A) {
  const Eigen::Index n = A.cols();
  SplitMix64 rng(kPowerStartSeed);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  double nv = v.norm();
  if (nv == 0.0) {
    v.setOnes();
    nv = v.norm();
  }
  v /= nv;

  double lambda = 0.0;
  double lambda_prev = -1.0;
  for (int it = 0; it < kPowerMaxIters; ++it) {
    Vec w = A.transpose() * (A * v);
    lambda = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (std::abs(lambda - lambda_prev) <=
        std::abs(lambda) * 4.0 * std::numeric_limits<double>::epsilon()) {
      break;
    }
    lambda_prev = lambda;
  }
  return std::max(lambda, 0.0);
}

}  // namespace

SpectralSummary spectral_summary(const LinearMap& K, double tol) {
  if (!(tol > 0.0) || tol > 1e-3) {
    throw std::invalid_argument("spectral_summary: tol must lie in (0, 1e-3]");
  }
  const Mat& A = K.matrix();

  SpectralSummary s;
  s.op_norm = std::sqrt(power_lambda_max(A));

  const Mat G = A * A.transpose();
  const SymEigen eig = jacobi_eigen(G);

  if (s.op_norm == 0.0) {
    s.lambda_min = 0.0;
    s.lambda_min_pos.reset();
    return s;
  }

  const double thresh =
      s.op_norm * s.op_norm * zero_threshold_scale(A.rows(), A.cols());

  double lo = eig.values[0];
  s.lambda_min = (lo < thresh) ? 0.0 : lo;

  std::optional<double> pos;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values[i] >= thresh) {
      pos = eig.values[i];
      break;
    }
  }
  // op_norm and the eigenvalues come from two independent routines; clamp to
  // keep the ordering lambda_min <= lambda_min_pos <= op_norm^2 exact.
  if (pos) {
    *pos = std::min(*pos, s.op_norm * s.op_norm);
    s.lambda_min = std::min(s.lambda_min, *pos);
  }
  s.lambda_min_pos = pos;
  return s;
}

Mat range_projector(const LinearMap& K) {
  const Mat& A = K.matrix();
  const Mat G = A * A.transpose();
  const SymEigen eig = jacobi_eigen(G);
  const double lam_max = std::max(eig.values[eig.values.size() - 1], 0.0);
  const double thresh = lam_max * zero_threshold_scale(A.rows(), A.cols());
  Mat P = Mat::Zero(A.rows(), A.rows());
  if (lam_max == 0.0) return P;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values[i] >= thresh) {
      P += eig.vectors.col(i) * eig.vectors.col(i).transpose();
    }
  }
  return P;
}

Mat read_matrix(std::istream& in) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (!(in >> rows >> cols)) {
    throw ConfigError("matrix file: expected header 'rows cols'");
  }
  if (rows < 1 || cols < 1) {
    throw ConfigError("matrix file: dimensions must be positive");
  }
  Mat A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!(in >> v)) {
        throw ConfigError("matrix file: too few entries at row " +
                          std::to_string(i));
      }
      if (!std::isfinite(v)) {
        throw ConfigError("matrix file: non-finite entry");
      }
      A(i, j) = v;
    }
  }
  return A;
}

Mat read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Mat& A) {
  out << A.rows() << " " << A.cols() << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", A(i, j));
      out << (j ? " " : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace pdsplit
