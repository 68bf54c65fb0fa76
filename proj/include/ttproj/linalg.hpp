#pragma once

// Matrix decompositions and projectors: full and rank-s truncated SVD,
// orthogonal projectors onto a frame and its complement, and orthonormal
// complement bases. The SVD backend is Eigen's two-sided Jacobi, which is
// numerically stable without ever forming a Gram matrix or a pseudoinverse.

#include "ttproj/tensor3.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ttproj {

// Tolerance on |U^T U - I| accepted for matrices claimed orthonormal at API
// boundaries.
inline constexpr double kOrthTol = 1e-8;

inline void require_orthonormal_columns(const Matrix& u, const char* what) {
  if (u.cols() == 0) return;
  const double dev = (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).norm();
  if (!(dev <= kOrthTol))
    throw std::invalid_argument(std::string(what) + ": columns are not orthonormal (Gram deviation " +
                                std::to_string(dev) + ")");
}

struct SvdTriple {
  Matrix u;  // n x m', orthonormal columns, m' = min(n, m)
  Vector s;  // m' singular values, nonincreasing
  Matrix v;  // m x m', orthonormal columns
};

// Thin SVD with all min(n, m) triples: a = u * diag(s) * v^T.
inline SvdTriple svd_full(const Matrix& a) {
  if (!a.allFinite()) throw std::invalid_argument("svd_full: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw std::runtime_error("svd_full: Jacobi SVD did not converge on a " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " matrix");
  return SvdTriple{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

// Leading factors of a rank-s truncated SVD. When rank(a) < s the trailing
// columns of u and v come from the backend's deterministic completion (the
// identity for an all-zero input), with zero singular values.
struct TruncatedSvd {
  Matrix u;  // n x s
  Vector s;  // s values, nonincreasing, >= 0
  Matrix v;  // m x s
};

inline TruncatedSvd svd_trunc(const Matrix& a, Index s) {
  if (s < 0 || s > std::min(a.rows(), a.cols()))
    throw std::invalid_argument("svd_trunc: rank " + std::to_string(s) + " out of range for " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  if (!a.allFinite()) throw std::invalid_argument("svd_trunc: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success)
    throw std::runtime_error("svd_trunc: Jacobi SVD did not converge on a " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " matrix");
  return TruncatedSvd{svd.matrixU().leftCols(s), svd.singularValues().head(s),
                      svd.matrixV().leftCols(s)};
}

// P_U a = U U^T a.
inline Matrix apply_proj(const Matrix& u, const Matrix& a) {
  require_orthonormal_columns(u, "apply_proj");
  if (u.rows() != a.rows())
    throw std::invalid_argument("apply_proj: row counts differ");
  return u * (u.transpose() * a);
}

// P_U^perp a = a - U U^T a.
inline Matrix apply_proj_perp(const Matrix& u, const Matrix& a) {
  require_orthonormal_columns(u, "apply_proj_perp");
  if (u.rows() != a.rows())
    throw std::invalid_argument("apply_proj_perp: row counts differ");
  return a - u * (u.transpose() * a);
}

// Orthonormal q with [u q] square orthogonal; q spans the complement of
// range(u). Deterministic (Householder QR completion).
inline Matrix orth_complement(const Matrix& u) {
  require_orthonormal_columns(u, "orth_complement");
  const Index n = u.rows();
  const Index s = u.cols();
  if (s >= n)
    throw std::invalid_argument("orth_complement: no complement for " + std::to_string(s) +
                                " columns in dimension " + std::to_string(n));
  if (s == 0) return Matrix::Identity(n, n);
  Eigen::HouseholderQR<Matrix> qr(u);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - s);
}

// Thin Q factor of a; with a of full column rank this orthonormalizes the
// columns while preserving their span.
inline Matrix orthonormal_columns(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), std::min(a.rows(), a.cols()));
}

}  // namespace ttproj
