#pragma once

// The tangent cone to the variety of tensors with TT-rank bounded by
// (r1+s1, r2+s2), at a point x of TT-rank (r1, r2) given as a CanonicalTtPair.
// Tangent vectors are parametrized as a sum of six mutually orthogonal TT
// terms; for fixed gap frames (u1, v3) the optimal remaining parameters have
// closed forms, and the first three terms span the tangent space of the
// fixed-rank manifold.

#include "ttproj/linalg.hpp"
#include "ttproj/tensor3.hpp"
#include "ttproj/ttd.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ttproj {

// Parameters of a tangent-cone element at x:
//   g = w1 . p2 . p3  +  q1 . q2 . w3  +  q1 . w2 . p3
//     + u1 . v2 . p3  +  q1 . u2 . v3  +  u1 . z2 . v3
// subject to the orthogonality conditions checked by validate_params. Gap
// widths s1, s2 may be zero; the factors involving them are then empty and
// their terms vanish.
struct TangentParams {
  Matrix u1;   // n1 x s1, orthonormal columns, u1^T q1 = 0
  Matrix w1;   // n1 x r1, w1^T q1 = 0
  Tensor3 u2;  // r1 x n2 x s2, (u2^R)^T q2^R = 0
  Tensor3 w2;  // r1 x n2 x r2, free
  Tensor3 z2;  // s1 x n2 x s2, free
  Tensor3 v2;  // s1 x n2 x r2, v2^L (p2^L)^T = 0
  Matrix w3;   // r2 x n3, w3 p3^T = 0
  Matrix v3;   // s2 x n3, orthonormal rows, v3 p3^T = 0

  Index s1() const { return u1.cols(); }
  Index s2() const { return v3.rows(); }
};

namespace detail {

inline void require_residual(double residual, double scale, double tol, const char* what) {
  if (!(residual <= tol * std::max(1.0, scale)))
    throw std::invalid_argument(std::string(what) + ": orthogonality residual " +
                                std::to_string(residual) + " exceeds tolerance");
}

}  // namespace detail

// Admissibility of a gap-frame pair: u1 orthonormal and orthogonal to the
// range of q1, v3 with orthonormal rows orthogonal to the rows of p3.
inline void validate_frames(const Matrix& u1, const Matrix& v3, const CanonicalTtPair& x,
                            double tol = kOrthTol) {
  const Dims3 d = x.dims();
  if (u1.rows() != d.n1)
    throw std::invalid_argument("validate_frames: u1 has " + std::to_string(u1.rows()) +
                                " rows, expected " + std::to_string(d.n1));
  if (v3.cols() != d.n3)
    throw std::invalid_argument("validate_frames: v3 has " + std::to_string(v3.cols()) +
                                " columns, expected " + std::to_string(d.n3));
  if (u1.cols() + x.r1() > d.n1 || v3.rows() + x.r2() > d.n3)
    throw std::invalid_argument("validate_frames: gap frame exceeds ambient dimension");
  if (u1.cols() > 0) {
    detail::require_residual((u1.transpose() * u1 - Matrix::Identity(u1.cols(), u1.cols())).norm(),
                             1.0, tol, "validate_frames: u1 Gram");
    detail::require_residual((u1.transpose() * x.q1).norm(), 1.0, tol, "validate_frames: u1^T q1");
  }
  if (v3.rows() > 0) {
    detail::require_residual((v3 * v3.transpose() - Matrix::Identity(v3.rows(), v3.rows())).norm(),
                             1.0, tol, "validate_frames: v3 Gram");
    detail::require_residual((v3 * x.p3.transpose()).norm(), 1.0, tol, "validate_frames: v3 p3^T");
  }
}

inline void validate_params(const TangentParams& p, const CanonicalTtPair& x,
                            double tol = kOrthTol) {
  const Dims3 d = x.dims();
  const Index r1 = x.r1();
  const Index r2 = x.r2();
  const Index s1 = p.s1();
  const Index s2 = p.s2();
  auto shape = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("validate_params: bad shape for ") + what);
  };
  shape(p.w1.rows() == d.n1 && p.w1.cols() == r1, "w1");
  shape(p.w3.rows() == r2 && p.w3.cols() == d.n3, "w3");
  shape(p.u2.dims() == Dims3{r1, d.n2, s2}, "u2");
  shape(p.w2.dims() == Dims3{r1, d.n2, r2}, "w2");
  shape(p.z2.dims() == Dims3{s1, d.n2, s2}, "z2");
  shape(p.v2.dims() == Dims3{s1, d.n2, r2}, "v2");

  validate_frames(p.u1, p.v3, x, tol);
  detail::require_residual((p.w1.transpose() * x.q1).norm(), p.w1.norm(), tol,
                           "validate_params: w1^T q1");
  detail::require_residual((p.w3 * x.p3.transpose()).norm(), p.w3.norm(), tol,
                           "validate_params: w3 p3^T");
  detail::require_residual((p.u2.unfold_right().transpose() * x.q2.unfold_right()).norm(),
                           norm(p.u2), tol, "validate_params: (u2^R)^T q2^R");
  detail::require_residual((p.v2.unfold_left() * x.p2.unfold_left().transpose()).norm(),
                           norm(p.v2), tol, "validate_params: v2^L (p2^L)^T");
}

// Sum-of-terms assembly of a tangent vector from its parameters.
inline Tensor3 assemble(const TangentParams& p, const CanonicalTtPair& x) {
  validate_params(p, x);
  Tensor3 g = contract3(p.w1, x.p2, x.p3);
  g += contract3(x.q1, x.q2, p.w3);
  g += contract3(x.q1, p.w2, x.p3);
  if (p.s1() > 0) g += contract3(p.u1, p.v2, x.p3);
  if (p.s2() > 0) g += contract3(x.q1, p.u2, p.v3);
  if (p.s1() > 0 && p.s2() > 0) g += contract3(p.u1, p.z2, p.v3);
  return g;
}

// Equivalent assembly as a single TT contraction with stacked factors
//   [q1 u1 w1] . [[q2 u2 w2] [0 z2 v2] [0 0 p2]] . [w3; v3; p3].
inline Tensor3 assemble_block(const TangentParams& p, const CanonicalTtPair& x) {
  validate_params(p, x);
  const Dims3 d = x.dims();
  const Index r1 = x.r1();
  const Index r2 = x.r2();
  const Index s1 = p.s1();
  const Index s2 = p.s2();

  Matrix left(d.n1, r1 + s1 + r1);
  left.leftCols(r1) = x.q1;
  left.middleCols(r1, s1) = p.u1;
  left.rightCols(r1) = p.w1;

  Matrix right(r2 + s2 + r2, d.n3);
  right.topRows(r2) = p.w3;
  right.middleRows(r2, s2) = p.v3;
  right.bottomRows(r2) = x.p3;

  Tensor3 core(Dims3{r1 + s1 + r1, d.n2, r2 + s2 + r2});
  auto put = [&core](Index i0, Index k0, const Tensor3& block) {
    for (Index k = 0; k < block.n3(); ++k)
      for (Index j = 0; j < block.n2(); ++j)
        for (Index i = 0; i < block.n1(); ++i) core(i0 + i, j, k0 + k) = block(i, j, k);
  };
  put(0, 0, x.q2);
  put(0, r2, p.u2);
  put(0, r2 + s2, p.w2);
  put(r1, r2, p.z2);
  put(r1, r2 + s2, p.v2);
  put(r1 + s1, r2 + s2, x.p2);

  return contract3(left, core, right);
}

// Optimal parameters for a given pair of admissible gap frames: each block
// is the least-squares coefficient of y on its (mutually orthogonal) term,
// so the assembled tensor is the orthogonal projection of y onto the linear
// span of the six terms. Applied to a tangent vector g with the same frames,
// this recovers g's parameters exactly.
inline TangentParams closed_form_params(const Tensor3& y, const CanonicalTtPair& x,
                                        const Matrix& u1, const Matrix& v3) {
  if (!(y.dims() == x.dims()))
    throw std::invalid_argument("closed_form_params: extents " + to_string(y.dims()) +
                                " vs point " + to_string(x.dims()));
  validate_frames(u1, v3, x);
  const Dims3 d = x.dims();
  const Index r1 = x.r1();
  const Index r2 = x.r2();
  const Index s1 = u1.cols();
  const Index s2 = v3.rows();

  const Matrix p2l = x.p2.unfold_left();    // r1 x (n2 r2)
  const Matrix q2r = x.q2.unfold_right();   // (r1 n2) x r2

  // Third mode contracted with the row-orthonormal core chain.
  const Tensor3 y3 = mode3_multiply(y, x.p3.transpose());  // n1 x n2 x r2
  const Matrix l = y3.unfold_left();                       // n1 x (n2 r2)

  // First mode contracted with the column-orthonormal core chain.
  const Tensor3 y1 = mode1_multiply(x.q1.transpose(), y);  // r1 x n2 x n3
  const Matrix k = y1.unfold_right();                      // (r1 n2) x n3

  TangentParams p;
  p.u1 = u1;
  p.v3 = v3;

  p.w1 = l * p2l.transpose();
  p.w1 -= x.q1 * (x.q1.transpose() * p.w1);

  p.w2 = mode1_multiply(x.q1.transpose(), y3);

  p.w3 = q2r.transpose() * k;
  p.w3 -= (p.w3 * x.p3.transpose()) * x.p3;

  const Matrix k_perp = k - q2r * (q2r.transpose() * k);   // (r1 n2) x n3
  p.u2 = fold_right(k_perp * v3.transpose(), Dims3{r1, d.n2, s2});

  const Matrix l_perp = l - (l * p2l.transpose()) * p2l;   // n1 x (n2 r2)
  p.v2 = fold_left(u1.transpose() * l_perp, Dims3{s1, d.n2, r2});

  p.z2 = mode1_multiply(u1.transpose(), mode3_multiply(y, v3.transpose()));

  return p;
}

// Parameters of a tangent vector g read back against the frames (u1, v3) it
// was built with; for arbitrary input this yields the component captured by
// those frames (extraction is idempotent).
inline TangentParams extract_params(const Tensor3& g, const CanonicalTtPair& x,
                                    const Matrix& u1, const Matrix& v3) {
  return closed_form_params(g, x, u1, v3);
}

// The feasible cone element for the frames (u1, v3): the orthogonal
// projection of y onto the span of the six terms, so <y - t, t> = 0.
inline Tensor3 y_parallel(const Tensor3& y, const CanonicalTtPair& x, const Matrix& u1,
                          const Matrix& v3) {
  return assemble(closed_form_params(y, x, u1, v3), x);
}

// Orthogonal projection onto the tangent space of the fixed-rank manifold at
// x (the first three terms of the parametrization). Linear in y, idempotent.
inline Tensor3 project_tangent_space(const Tensor3& y, const CanonicalTtPair& x) {
  const Matrix empty_u1(x.dims().n1, 0);
  const Matrix empty_v3(0, x.dims().n3);
  const TangentParams p = closed_form_params(y, x, empty_u1, empty_v3);
  Tensor3 g = contract3(p.w1, x.p2, x.p3);
  g += contract3(x.q1, x.q2, p.w3);
  g += contract3(x.q1, p.w2, x.p3);
  return g;
}

}  // namespace ttproj
