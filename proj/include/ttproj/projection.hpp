#pragma once

// Approximate projection onto the tangent cone: the alternating truncated-SVD
// iteration for the gap frames (u1, v3), the assembled projection with its
// closed-form parameters, and the angle-condition bounds it satisfies.

#include "ttproj/linalg.hpp"
#include "ttproj/tangent.hpp"
#include "ttproj/tensor3.hpp"
#include "ttproj/ttd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttproj {

// Raised where a quantity is undefined for zero input (e.g. the angle
// between a tensor and the zero tensor).
class ZeroInputError : public std::domain_error {
 public:
  explicit ZeroInputError(const std::string& what) : std::domain_error(what) {}
};

// Angle-condition constant sqrt(max{(k1-r1)/(n1-r1), (k2-r2)/(n3-r2)}) for a
// point of TT-rank (r1, r2) on the variety bounded by (k1, k2).
inline double omega_bound(Dims3 n, Index r1, Index r2, Index k1, Index k2) {
  if (r1 > k1 || r2 > k2)
    throw std::invalid_argument("omega_bound: point rank exceeds the variety bound");
  if (r1 == k1 && r2 == k2)
    throw std::invalid_argument("omega_bound: undefined at smooth points (ranks equal bounds)");
  if (r1 >= n.n1 || r2 >= n.n3 || k1 > n.n1 || k2 > n.n3)
    throw std::invalid_argument("omega_bound: ranks incompatible with extents " + to_string(n));
  const double a = static_cast<double>(k1 - r1) / static_cast<double>(n.n1 - r1);
  const double b = static_cast<double>(k2 - r2) / static_cast<double>(n.n3 - r2);
  return std::sqrt(std::max(a, b));
}

// The conservative reading of the same bound (its square); the benchmark
// reports both.
inline double omega_bound_conservative(Dims3 n, Index r1, Index r2, Index k1, Index k2) {
  const double w = omega_bound(n, r1, r2, k1, k2);
  return w * w;
}

// Angle-condition constant of the prior approximate projection by Kutschan,
// 1/(6 sqrt(n1 n2 n3)); used as the comparison baseline.
inline double kutschan_omega(Dims3 n) {
  if (n.n1 < 1 || n.n2 < 1 || n.n3 < 1)
    throw std::invalid_argument("kutschan_omega: extents must be positive, got " + to_string(n));
  return 1.0 / (6.0 * std::sqrt(static_cast<double>(n.n1) * static_cast<double>(n.n2) *
                                static_cast<double>(n.n3)));
}

// <y/|y|, t/|t|>, in [-1, 1]. Undefined for zero input.
inline double angle_value(const Tensor3& y, const Tensor3& t) {
  const double ny = norm(y);
  const double nt = norm(t);
  if (ny == 0.0 || nt == 0.0)
    throw ZeroInputError("angle_value: undefined for a zero tensor");
  return std::clamp(inner(y, t) / (ny * nt), -1.0, 1.0);
}

namespace detail {

struct TruncFrame {
  Matrix frame;  // n x s, orthonormal, orthogonal to keep_out
  Vector sigma;  // the s leading singular values (zeros past the matrix size)
};

// Leading s left singular vectors of a, kept orthogonal to range(keep_out).
// Columns whose singular value is numerically null (relative to
// max(sigma_max, scale)) carry no information; they are replaced by a
// deterministic orthonormal basis of the remaining complement so the frame
// stays admissible even when a vanishes. The kept columns are re-projected
// and re-orthonormalized, which is a no-op up to roundoff for healthy input.
inline TruncFrame leading_left_frame(const Matrix& a, Index s, const Matrix& keep_out,
                                     double scale) {
  const Index n = a.rows();
  if (s + keep_out.cols() > n)
    throw std::invalid_argument("leading_left_frame: frame does not fit next to keep_out");
  TruncFrame out;
  out.sigma = Vector::Zero(s);
  if (s == 0) {
    out.frame = Matrix(n, 0);
    return out;
  }
  const Index lead = std::min(s, std::min(n, a.cols()));
  const TruncatedSvd t = svd_trunc(a, lead);
  out.sigma.head(lead) = t.s.head(lead);

  const double cutoff = 1e-12 * std::max(lead > 0 ? t.s[0] : 0.0, scale);
  Index good = 0;
  while (good < lead && t.s[good] > cutoff) ++good;

  out.frame.resize(n, s);
  if (good > 0) {
    Matrix kept = t.u.leftCols(good);
    kept -= keep_out * (keep_out.transpose() * kept);
    out.frame.leftCols(good) = orthonormal_columns(kept);
  }
  if (good < s) {
    Matrix base(n, keep_out.cols() + good);
    base.leftCols(keep_out.cols()) = keep_out;
    base.rightCols(good) = out.frame.leftCols(good);
    out.frame.rightCols(s - good) = orth_complement(base).leftCols(s - good);
  }
  return out;
}

// Row-frame analogue: leading s right singular vectors of a as rows,
// orthogonal to the rows of keep_out.
inline TruncFrame leading_right_frame(const Matrix& a, Index s, const Matrix& keep_out,
                                      double scale) {
  TruncFrame t = leading_left_frame(a.transpose(), s, keep_out.transpose(), scale);
  t.frame.transposeInPlace();
  return t;
}

}  // namespace detail

struct AlternatingResult {
  Matrix u1;  // n1 x s1
  Matrix v3;  // s2 x n3
  std::vector<double> eta_trace;  // captured gap energy after each iteration
  int iterations = 0;
};

// Default initial frames: the leading columns (rows) of the deterministic
// orthonormal complements of q1 and of the rows of p3.
inline Matrix default_u1_init(const CanonicalTtPair& x, Index s1) {
  return s1 > 0 ? Matrix(orth_complement(x.q1).leftCols(s1)) : Matrix(x.dims().n1, 0);
}

inline Matrix default_v3_init(const CanonicalTtPair& x, Index s2) {
  return s2 > 0 ? Matrix(orth_complement(x.p3.transpose()).leftCols(s2).transpose())
                : Matrix(0, x.dims().n3);
}

// Alternating truncated SVDs for the gap frames, starting from the given
// admissible pair. Each sweep updates one frame to the leading singular
// frame of a thin residual matrix while the other is fixed; the captured
// energy eta is nondecreasing. Iteration stops after i_max sweeps or once
// the improvement in eta is at most eps.
inline AlternatingResult alternating_uv_from(const Tensor3& y, const CanonicalTtPair& x,
                                             Matrix u1, Matrix v3, double eps, int i_max) {
  const Dims3 d = x.dims();
  const Index r1 = x.r1();
  const Index r2 = x.r2();
  const Index s1 = u1.cols();
  const Index s2 = v3.rows();
  if (!(y.dims() == d))
    throw std::invalid_argument("alternating_uv: extents " + to_string(y.dims()) + " vs point " +
                                to_string(d));
  if (s1 + s2 == 0) throw std::invalid_argument("alternating_uv: both gaps are empty");
  if (!(eps > 0)) throw std::invalid_argument("alternating_uv: eps must be positive");
  if (i_max < 1) throw std::invalid_argument("alternating_uv: i_max must be at least 1");
  validate_frames(u1, v3, x);

  const double scale = norm(y);
  const Matrix p2l = x.p2.unfold_left();
  const Matrix q2r = x.q2.unfold_right();

  // Iteration-independent pieces.
  const Matrix l = mode3_multiply(y, x.p3.transpose()).unfold_left();  // n1 x (n2 r2)
  const Matrix l_perp = l - (l * p2l.transpose()) * p2l;
  const Matrix a_tail = l_perp - x.q1 * (x.q1.transpose() * l_perp);   // n1 x (n2 r2)
  const Matrix k = mode1_multiply(x.q1.transpose(), y).unfold_right(); // (r1 n2) x n3
  const Matrix k_perp = k - q2r * (q2r.transpose() * k);
  const Matrix b_tail = k_perp - (k_perp * x.p3.transpose()) * x.p3;   // (r1 n2) x n3

  // Captured energy of the current u1 against the fixed part of the residual.
  auto u_energy = [&](const Matrix& u) { return (u.transpose() * l_perp).squaredNorm(); };
  auto v_energy = [&](const Matrix& v) { return (k_perp * v.transpose()).squaredNorm(); };

  auto update_u1 = [&](const Matrix& v) {
    Matrix a(d.n1, d.n2 * (s2 + r2));
    a.leftCols(d.n2 * s2) = mode3_multiply(y, v.transpose()).unfold_left();
    a.leftCols(d.n2 * s2) -= x.q1 * (x.q1.transpose() * a.leftCols(d.n2 * s2));
    a.rightCols(d.n2 * r2) = a_tail;
    return detail::leading_left_frame(a, s1, x.q1, scale);
  };
  auto update_v3 = [&](const Matrix& u) {
    Matrix b((s1 + r1) * d.n2, d.n3);
    Matrix top = mode1_multiply(u.transpose(), y).unfold_right();      // (s1 n2) x n3
    top -= (top * x.p3.transpose()) * x.p3;
    b.topRows(s1 * d.n2) = top;
    b.bottomRows(r1 * d.n2) = b_tail;
    return detail::leading_right_frame(b, s2, x.p3, scale);
  };

  // When the second gap is relatively larger, update u1 first so the v3
  // truncation sees the refreshed frame; otherwise swap the order. Ties take
  // the swapped branch.
  const bool u_first = s2 * (d.n1 - r1) > s1 * (d.n3 - r2);

  AlternatingResult res;
  res.eta_trace.reserve(static_cast<std::size_t>(i_max));
  double eta_prev = 0.0;
  double eta_new = std::numeric_limits<double>::infinity();
  int i = 0;
  while (i < i_max && std::abs(eta_new - eta_prev) > eps) {
    eta_prev = eta_new;
    ++i;
    if (u_first) {
      detail::TruncFrame fu = update_u1(v3);
      u1 = std::move(fu.frame);
      detail::TruncFrame fv = update_v3(u1);
      v3 = std::move(fv.frame);
      eta_new = fv.sigma.squaredNorm() + u_energy(u1);
    } else {
      detail::TruncFrame fv = update_v3(u1);
      v3 = std::move(fv.frame);
      detail::TruncFrame fu = update_u1(v3);
      u1 = std::move(fu.frame);
      eta_new = fu.sigma.squaredNorm() + v_energy(v3);
    }
    res.eta_trace.push_back(eta_new);
  }
  res.u1 = std::move(u1);
  res.v3 = std::move(v3);
  res.iterations = i;
  return res;
}

// Same iteration from the deterministic default initial frames.
inline AlternatingResult alternating_uv(const Tensor3& y, const CanonicalTtPair& x, Index s1,
                                        Index s2, double eps, int i_max) {
  const Dims3 d = x.dims();
  if (s1 < 0 || s2 < 0 || s1 > d.n1 - x.r1() || s2 > d.n3 - x.r2())
    throw std::invalid_argument("alternating_uv: gap widths out of range");
  return alternating_uv_from(y, x, default_u1_init(x, s1), default_v3_init(x, s2), eps, i_max);
}

struct ProjectionResult {
  Tensor3 y_tilde;
  TangentParams params;
  std::vector<double> eta_trace;
  int iterations = 0;
  double omega = 0.0;               // angle-condition constant claimed for this run
  double tangent_space_norm = 0.0;  // norm of the tangent-space projection of y
};

// Approximate projection of y onto the tangent cone at x for the variety
// bounded by (k1, k2): alternating frames, then closed-form parameters, then
// assembly. The result t is feasible, <y - t, t> = 0, and satisfies the
// angle condition with omega_bound for every eps and i_max. At smooth points
// (k equal to the rank of x) it is the exact tangent-space projection.
inline ProjectionResult approx_project(const Tensor3& y, const CanonicalTtPair& x, Index k1,
                                       Index k2, double eps = 1e-16, int i_max = 10) {
  const Dims3 d = x.dims();
  const Index r1 = x.r1();
  const Index r2 = x.r2();
  if (k1 < r1 || k2 < r2)
    throw std::invalid_argument("approx_project: bound (" + std::to_string(k1) + ", " +
                                std::to_string(k2) + ") below the point's TT-rank (" +
                                std::to_string(r1) + ", " + std::to_string(r2) + ")");
  if (k1 > d.n1 || k2 > d.n3)
    throw std::invalid_argument("approx_project: bound exceeds extents " + to_string(d));
  const Index s1 = k1 - r1;
  const Index s2 = k2 - r2;

  ProjectionResult res;
  res.tangent_space_norm = norm(project_tangent_space(y, x));
  if (s1 + s2 == 0) {
    res.params = closed_form_params(y, x, Matrix(d.n1, 0), Matrix(0, d.n3));
    res.y_tilde = assemble(res.params, x);
    res.omega = 1.0;  // the cone is the tangent space; the projection is exact
    return res;
  }

  AlternatingResult alt = alternating_uv(y, x, s1, s2, eps, i_max);
  res.params = closed_form_params(y, x, alt.u1, alt.v3);
  res.y_tilde = assemble(res.params, x);
  res.eta_trace = std::move(alt.eta_trace);
  res.iterations = alt.iterations;
  res.omega = omega_bound(d, r1, r2, k1, k2);
  return res;
}

}  // namespace ttproj
