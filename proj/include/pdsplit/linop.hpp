#pragma once

// Dense linear operator with forward/adjoint application and the spectral
// quantities consumed by stepsize rules and rate bounds: the operator norm
// ||K||, the smallest eigenvalue of K K^T, and the smallest positive
// eigenvalue of K K^T.

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

namespace pdsplit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Shared instrumentation hook: counts oracle calls when attached.
struct OracleCounts {
  long grad = 0;
  long prox = 0;
  long prox_conj = 0;
  long k_apply = 0;
  long k_adjoint = 0;
};

struct SpectralSummary {
  double op_norm = 0.0;     // largest singular value of K
  double lambda_min = 0.0;  // smallest eigenvalue of K K^T (0 if below threshold)
  // Smallest eigenvalue of K K^T above the zero threshold; absent exactly
  // when K is the zero map.
  std::optional<double> lambda_min_pos;
};

class LinearMap {
 public:
  explicit LinearMap(Mat A);

  Eigen::Index rows() const { return A_.rows(); }
  Eigen::Index cols() const { return A_.cols(); }
  const Mat& matrix() const { return A_; }

  Vec apply(const Vec& x) const;          // K x
  Vec apply_adjoint(const Vec& y) const;  // K^T y

  void attach_counter(std::shared_ptr<OracleCounts> counter) {
    counter_ = std::move(counter);
  }

 private:
  Mat A_;
  std::shared_ptr<OracleCounts> counter_;  // test instrumentation only
};

// Eigenvalues of K K^T below op_norm^2 * zero_threshold_scale(rows, cols)
// are treated as exactly zero when deciding lambda_min_pos.
double zero_threshold_scale(Eigen::Index rows, Eigen::Index cols);

// op_norm via power iteration on K^T K (fixed deterministic start vector, at
// most 10000 iterations); lambda_min / lambda_min_pos via a cyclic Jacobi
// eigendecomposition of K K^T. tol must lie in (0, 1e-3]; the summary is
// accurate to well below that.
SpectralSummary spectral_summary(const LinearMap& K, double tol = 1e-12);

// Symmetric eigendecomposition by cyclic Jacobi rotations: eigenvalues in
// ascending order, matching eigenvectors as columns.
struct SymEigen {
  Vec values;
  Mat vectors;
};
SymEigen jacobi_eigen(const Mat& S);

// Orthogonal projector onto ran(K), assembled from the eigenvectors of K K^T
// whose eigenvalues exceed the zero threshold.
Mat range_projector(const LinearMap& K);

// Plain-text matrix format: first line "rows cols", then one line per row of
// space-separated decimals.
Mat read_matrix(std::istream& in);
Mat read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Mat& A);

}  // namespace pdsplit
