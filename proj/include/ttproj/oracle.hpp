#pragma once

// Desk-scale reference for the exact projection onto the tangent cone. Every
// exact projection is the feasible point of some admissible gap-frame pair,
// so maximizing the feasible point's norm over the frames is lossless. Two
// search strategies are provided: multistart alternating iterations, and an
// exhaustive angle grid for the tiny configurations where the complements
// are at most two-dimensional.

#include "ttproj/linalg.hpp"
#include "ttproj/projection.hpp"
#include "ttproj/rng.hpp"
#include "ttproj/tangent.hpp"
#include "ttproj/tensor3.hpp"
#include "ttproj/ttd.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ttproj {

struct OracleOptions {
  double eps = 1e-16;
  int i_max = 50;
};

struct OracleResult {
  Tensor3 y_hat;
  double value = 0.0;  // |y_hat|
  Matrix u1;           // best gap frames found
  Matrix v3;
  int starts_used = 0;  // starts (multistart) or grid points evaluated (grid)
  std::string method;
};

// Haar-random admissible gap frames inside the complements of q1 and p3.
inline std::pair<Matrix, Matrix> random_admissible_frames(const CanonicalTtPair& x, Index s1,
                                                          Index s2, NormalRng& rng) {
  const Dims3 d = x.dims();
  Matrix u1(d.n1, 0);
  if (s1 > 0) {
    const Matrix qc = orth_complement(x.q1);
    u1 = qc * orthonormal_columns(gaussian_matrix(qc.cols(), s1, rng));
  }
  Matrix v3(0, d.n3);
  if (s2 > 0) {
    const Matrix qc = orth_complement(x.p3.transpose());
    v3 = (qc * orthonormal_columns(gaussian_matrix(qc.cols(), s2, rng))).transpose();
  }
  return {std::move(u1), std::move(v3)};
}

// Best feasible point over n_starts runs of the alternating iteration. The
// first start uses the same deterministic initial frames as approx_project,
// so the result never falls below the approximate projection; the remaining
// starts draw Haar-random admissible frames from the seeded generator. Ties
// keep the lowest start index.
inline OracleResult exact_project_multistart(const Tensor3& y, const CanonicalTtPair& x, Index k1,
                                             Index k2, int n_starts, std::uint64_t seed,
                                             OracleOptions opts = {}) {
  const Index s1 = k1 - x.r1();
  const Index s2 = k2 - x.r2();
  if (s1 < 0 || s2 < 0)
    throw std::invalid_argument("exact_project_multistart: bound below the point's TT-rank");
  if (n_starts < 1) throw std::invalid_argument("exact_project_multistart: n_starts must be >= 1");

  OracleResult best;
  best.method = "multistart";
  if (s1 + s2 == 0) {
    best.y_hat = project_tangent_space(y, x);
    best.value = norm(best.y_hat);
    best.u1 = Matrix(x.dims().n1, 0);
    best.v3 = Matrix(0, x.dims().n3);
    return best;
  }

  // The cone is invariant under positive scaling, so the search runs on the
  // normalized direction; this keeps the stopping decisions, and hence the
  // whole search path, independent of the input scale.
  const double scale = norm(y);
  if (scale == 0.0) {
    best.y_hat = Tensor3(x.dims());
    best.u1 = default_u1_init(x, s1);
    best.v3 = default_v3_init(x, s2);
    return best;
  }
  const Tensor3 y_unit = (1.0 / scale) * y;

  best.value = -1.0;
  for (int start = 0; start < n_starts; ++start) {
    Matrix u1_init, v3_init;
    if (start == 0) {
      u1_init = default_u1_init(x, s1);
      v3_init = default_v3_init(x, s2);
    } else {
      NormalRng rng = NormalRng::stream(seed, static_cast<std::uint64_t>(start));
      std::tie(u1_init, v3_init) = random_admissible_frames(x, s1, s2, rng);
    }
    AlternatingResult alt = alternating_uv_from(y_unit, x, std::move(u1_init),
                                                std::move(v3_init), opts.eps, opts.i_max);
    Tensor3 candidate = y_parallel(y_unit, x, alt.u1, alt.v3);
    const double value = norm(candidate);
    if (value > best.value) {
      best.value = value;
      best.y_hat = std::move(candidate);
      best.u1 = std::move(alt.u1);
      best.v3 = std::move(alt.v3);
    }
  }
  best.value *= scale;
  best.y_hat *= scale;
  best.starts_used = n_starts;
  return best;
}

namespace detail {

// |y_parallel|^2 restricted to one-dimensional gaps inside complements of
// dimension at most two, as a closed form in the two frame angles. The six
// terms are mutually orthogonal, so the squared norm splits into the fixed
// tangent-space part plus three quadratic forms in the angle vectors.
class GridObjective {
 public:
  GridObjective(const Tensor3& y, const CanonicalTtPair& x)
      : qc1_(orth_complement(x.q1)), qc3_(orth_complement(x.p3.transpose())) {
    const Matrix p2l = x.p2.unfold_left();
    const Matrix q2r = x.q2.unfold_right();
    base2_ = std::pow(norm(project_tangent_space(y, x)), 2);

    const Matrix l = mode3_multiply(y, x.p3.transpose()).unfold_left();
    const Matrix l_perp = l - (l * p2l.transpose()) * p2l;
    const Matrix g = qc1_.transpose() * l_perp;
    m_v2_ = g * g.transpose();

    const Matrix k = mode1_multiply(x.q1.transpose(), y).unfold_right();
    const Matrix k_perp = k - q2r * (q2r.transpose() * k);
    const Matrix h = k_perp * qc3_;
    n_u2_ = h.transpose() * h;

    const Dims3 d = x.dims();
    slices_.reserve(static_cast<std::size_t>(d.n2));
    for (Index j = 0; j < d.n2; ++j) {
      Matrix yj(d.n1, d.n3);
      for (Index kk = 0; kk < d.n3; ++kk)
        for (Index i = 0; i < d.n1; ++i) yj(i, kk) = y(i, j, kk);
      slices_.push_back(qc1_.transpose() * yj * qc3_);
    }
  }

  Index dim1() const { return qc1_.cols(); }
  Index dim3() const { return qc3_.cols(); }

  Vector direction1(double theta) const { return direction(dim1(), theta); }
  Vector direction3(double phi) const { return direction(dim3(), phi); }

  double operator()(double theta, double phi) const {
    const Vector a = direction1(theta);
    const Vector b = direction3(phi);
    double value = base2_ + a.dot(m_v2_ * a) + b.dot(n_u2_ * b);
    for (const Matrix& c : slices_) {
      const double z = a.dot(c * b);
      value += z * z;
    }
    return value;
  }

  Matrix frame_u1(double theta) const { return qc1_ * direction1(theta); }
  Matrix frame_v3(double phi) const { return (qc3_ * direction3(phi)).transpose(); }

 private:
  static Vector direction(Index dim, double angle) {
    Vector v(dim);
    if (dim == 1)
      v << 1.0;
    else
      v << std::cos(angle), std::sin(angle);
    return v;
  }

  Matrix qc1_;
  Matrix qc3_;
  double base2_ = 0.0;
  Matrix m_v2_;
  Matrix n_u2_;
  std::vector<Matrix> slices_;
};

// Golden-section maximization of f on [lo, hi].
template <typename F>
double golden_max(F&& f, double lo, double hi) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Exhaustive evaluation of the feasible point's norm over an angle grid,
// followed by a golden-section polish around the best cell. Requires
// one-dimensional gaps on both sides and complements of dimension at most
// two, so each frame is a point on a circle (or fixed when the complement is
// one-dimensional).
inline OracleResult exact_project_grid(const Tensor3& y, const CanonicalTtPair& x, Index k1,
                                       Index k2, int resolution) {
  const Dims3 d = x.dims();
  const Index s1 = k1 - x.r1();
  const Index s2 = k2 - x.r2();
  if (s1 != 1 || s2 != 1)
    throw std::invalid_argument("exact_project_grid: gap widths must both be 1");
  if (d.n1 - x.r1() > 2 || d.n3 - x.r2() > 2)
    throw std::invalid_argument("exact_project_grid: complements must have dimension <= 2");
  if (resolution < 1) throw std::invalid_argument("exact_project_grid: resolution must be >= 1");

  const detail::GridObjective f(y, x);
  // A sign flip of a frame leaves the captured subspace unchanged, so angles
  // range over half circles.
  const Index n_theta = f.dim1() == 1 ? 1 : resolution;
  const Index n_phi = f.dim3() == 1 ? 1 : resolution;
  const double step_theta = std::numbers::pi / static_cast<double>(n_theta);
  const double step_phi = std::numbers::pi / static_cast<double>(n_phi);

  double best_val = -1.0;
  double best_theta = 0.0, best_phi = 0.0;
  for (Index i = 0; i < n_theta; ++i) {
    const double theta = static_cast<double>(i) * step_theta;
    for (Index j = 0; j < n_phi; ++j) {
      const double phi = static_cast<double>(j) * step_phi;
      const double val = f(theta, phi);
      if (val > best_val) {
        best_val = val;
        best_theta = theta;
        best_phi = phi;
      }
    }
  }

  // Coordinate-wise golden-section refinement inside the neighboring cells.
  for (int round = 0; round < 6; ++round) {
    const double before = best_val;
    if (f.dim1() == 2)
      best_theta = detail::golden_max([&](double t) { return f(t, best_phi); },
                                      best_theta - step_theta, best_theta + step_theta);
    if (f.dim3() == 2)
      best_phi = detail::golden_max([&](double p) { return f(best_theta, p); },
                                    best_phi - step_phi, best_phi + step_phi);
    best_val = f(best_theta, best_phi);
    if (best_val - before <= 1e-13 * std::max(1.0, before)) break;
  }

  OracleResult out;
  out.method = "grid";
  out.starts_used = static_cast<int>(n_theta * n_phi);
  out.u1 = f.frame_u1(best_theta);
  out.v3 = f.frame_v3(best_phi);
  out.y_hat = y_parallel(y, x, out.u1, out.v3);
  out.value = norm(out.y_hat);
  return out;
}

}  // namespace ttproj
