#pragma once

// Tensor-train decompositions of third-order tensors: TT-SVD, TT-rank, the
// pair of orthogonal canonical forms used by the tangent-cone code, and a
// seeded random generator for low-TT-rank tensors.

#include "ttproj/linalg.hpp"
#include "ttproj/rng.hpp"
#include "ttproj/tensor3.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace ttproj {

// Raised when cores nominally of ranks (r1, r2) represent a tensor whose
// TT-rank is strictly smaller, so that an orthogonal canonical form at the
// nominal ranks does not exist. Callers can re-run at the detected ranks.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(std::pair<Index, Index> nominal, std::pair<Index, Index> detected)
      : std::runtime_error("rank-deficient cores: nominal TT-rank (" +
                           std::to_string(nominal.first) + ", " + std::to_string(nominal.second) +
                           "), detected (" + std::to_string(detected.first) + ", " +
                           std::to_string(detected.second) + ")"),
        nominal(nominal),
        detected(detected) {}

  std::pair<Index, Index> nominal;
  std::pair<Index, Index> detected;
};

// Tensor-train decomposition g1 . g2 . g3 of an n1 x n2 x n3 tensor, with
// g1: n1 x r1, g2: r1 x n2 x r2, g3: r2 x n3.
struct Ttd {
  Matrix g1;
  Tensor3 g2;
  Matrix g3;

  Index r1() const { return g1.cols(); }
  Index r2() const { return g3.rows(); }
  Dims3 dims() const { return Dims3{g1.rows(), g2.n2(), g3.cols()}; }

  Tensor3 full() const { return contract3(g1, g2, g3); }
};

inline void require_consistent(const Ttd& d, const char* what) {
  if (d.g1.cols() != d.g2.n1() || d.g2.n3() != d.g3.rows())
    throw std::invalid_argument(std::string(what) + ": core extents do not chain (" +
                                std::to_string(d.g1.cols()) + "," + std::to_string(d.g2.n1()) +
                                ") / (" + std::to_string(d.g2.n3()) + "," +
                                std::to_string(d.g3.rows()) + ")");
}

// TT-rank: the ranks of the two unfoldings, counting singular values above
// tol * sigma_max per unfolding.
inline std::pair<Index, Index> tt_rank(const Tensor3& t, double tol) {
  if (tol < 0) throw std::invalid_argument("tt_rank: negative tolerance");
  auto numerical_rank = [tol](const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return Index{0};
    const Vector s = svd_full(m).s;
    const double cutoff = tol * s[0];
    Index r = 0;
    while (r < s.size() && s[r] > cutoff) ++r;
    return r;
  };
  return {numerical_rank(t.unfold_left()), numerical_rank(t.unfold_right())};
}

// Standard TT-SVD truncation to target ranks (k1, k2): two successive
// truncated SVDs of unfoldings. Exact when TTrank(t) <= (k1, k2), otherwise
// the usual quasi-optimal approximation.
inline Ttd tt_svd(const Tensor3& t, Index k1, Index k2) {
  const Dims3 d = t.dims();
  if (k1 < 1 || k1 > std::min(d.n1, d.n2 * d.n3))
    throw std::invalid_argument("tt_svd: first target rank " + std::to_string(k1) +
                                " out of range for " + to_string(d));
  if (k2 < 1 || k2 > std::min(d.n3, std::min(d.n1 * d.n2, k1 * d.n2)))
    throw std::invalid_argument("tt_svd: second target rank " + std::to_string(k2) +
                                " out of range for " + to_string(d) + " with first rank " +
                                std::to_string(k1));

  const TruncatedSvd left = svd_trunc(t.unfold_left(), k1);
  Matrix g1 = left.u;                                       // n1 x k1
  const Matrix w = g1.transpose() * t.unfold_left();        // k1 x (n2 n3)
  const Tensor3 rest = fold_left(w, Dims3{k1, d.n2, d.n3});

  const TruncatedSvd right = svd_trunc(rest.unfold_right(), k2);
  Matrix g2r = right.u;                                     // (k1 n2) x k2
  Matrix g3 = g2r.transpose() * rest.unfold_right();        // k2 x n3
  return Ttd{std::move(g1), fold_right(g2r, Dims3{k1, d.n2, k2}), std::move(g3)};
}

// The two orthogonal forms of one tensor X of full TT-rank (r1, r2):
//   X = q1 . q2 . c3   with q1 and the right unfolding of q2 column-orthonormal,
//   X = c1 . p2 . p3   with the left unfolding of p2 and p3 row-orthonormal.
struct CanonicalTtPair {
  Matrix q1;   // n1 x r1, q1^T q1 = I
  Tensor3 q2;  // r1 x n2 x r2, (q2^R)^T q2^R = I
  Matrix c3;   // r2 x n3

  Matrix c1;   // n1 x r1
  Tensor3 p2;  // r1 x n2 x r2, p2^L (p2^L)^T = I
  Matrix p3;   // r2 x n3, p3 p3^T = I

  Index r1() const { return q1.cols(); }
  Index r2() const { return p3.rows(); }
  Dims3 dims() const { return Dims3{q1.rows(), q2.n2(), p3.cols()}; }

  Tensor3 full() const { return contract3(q1, q2, c3); }
};

// Orthogonalization sweeps producing both canonical forms. Uses QR per
// unfolding only; cores are never inverted. Throws RankDeficientError when
// the tensor's TT-rank (at relative tolerance 1e-12) is below the nominal
// core ranks, since the orthogonality conditions are unattainable then.
inline CanonicalTtPair canonicalize(const Ttd& d) {
  require_consistent(d, "canonicalize");
  const Dims3 dims = d.dims();
  const Index r1 = d.r1();
  const Index r2 = d.r2();
  if (r1 < 1 || r2 < 1) throw std::invalid_argument("canonicalize: ranks must be positive");
  if (r1 > std::min(dims.n1, dims.n2 * dims.n3) || r2 > std::min(dims.n3, dims.n1 * dims.n2))
    throw RankDeficientError({r1, r2}, tt_rank(d.full(), 1e-12));

  const auto detected = tt_rank(d.full(), 1e-12);
  if (detected.first < r1 || detected.second < r2)
    throw RankDeficientError({r1, r2}, detected);

  CanonicalTtPair x;

  // Sweep forward: orthonormalize g1, then the right unfolding of the core.
  {
    Eigen::HouseholderQR<Matrix> qr1(d.g1);
    x.q1 = qr1.householderQ() * Matrix::Identity(dims.n1, r1);
    const Matrix carry1 = Matrix(qr1.matrixQR().topRows(r1).triangularView<Eigen::Upper>());
    const Tensor3 core = mode1_multiply(carry1, d.g2);  // r1 x n2 x r2

    Eigen::HouseholderQR<Matrix> qr2(core.unfold_right());
    x.q2 = fold_right(qr2.householderQ() * Matrix::Identity(r1 * dims.n2, r2),
                      Dims3{r1, dims.n2, r2});
    const Matrix carry2 = Matrix(qr2.matrixQR().topRows(r2).triangularView<Eigen::Upper>());
    x.c3 = carry2 * d.g3;
  }

  // Sweep backward: orthonormalize g3 rows, then the left unfolding rows.
  {
    Eigen::HouseholderQR<Matrix> qr3(d.g3.transpose());
    x.p3 = (qr3.householderQ() * Matrix::Identity(dims.n3, r2)).transpose();
    const Matrix carry3 = Matrix(qr3.matrixQR().topRows(r2).triangularView<Eigen::Upper>()).transpose();
    const Tensor3 core = mode3_multiply(d.g2, carry3);  // r1 x n2 x r2

    Eigen::HouseholderQR<Matrix> qr2(core.unfold_left().transpose());
    x.p2 = fold_left((qr2.householderQ() * Matrix::Identity(dims.n2 * r2, r1)).transpose(),
                     Dims3{r1, dims.n2, r2});
    const Matrix carry2 = Matrix(qr2.matrixQR().topRows(r1).triangularView<Eigen::Upper>()).transpose();
    x.c1 = d.g1 * carry2;
  }

  return x;
}

// Seeded random TTD with standard normal cores; returns the contracted
// tensor together with its cores. Draw order: g1, then the g2 buffer, then
// g3, each column-major.
inline std::pair<Tensor3, Ttd> random_tt(Dims3 dims, Index r1, Index r2, NormalRng& rng) {
  if (dims.n1 < 1 || dims.n2 < 1 || dims.n3 < 1)
    throw std::invalid_argument("random_tt: extents must be positive, got " + to_string(dims));
  if (r1 < 1 || r2 < 1) throw std::invalid_argument("random_tt: ranks must be positive");
  Ttd d;
  d.g1 = gaussian_matrix(dims.n1, r1, rng);
  d.g2 = gaussian_tensor(Dims3{r1, dims.n2, r2}, rng);
  d.g3 = gaussian_matrix(r2, dims.n3, rng);
  Tensor3 t = d.full();
  return {std::move(t), std::move(d)};
}

inline std::pair<Tensor3, Ttd> random_tt(Dims3 dims, Index r1, Index r2, std::uint64_t seed) {
  NormalRng rng(seed);
  return random_tt(dims, r1, r2, rng);
}

}  // namespace ttproj
