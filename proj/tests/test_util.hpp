#pragma once

// Shared helpers for the test suites: independent reference implementations
// (kept away from the library code paths they check) and random generators
// for admissible test inputs.

#include "ttproj/ttproj.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace tt = ttproj;

// Plain five-loop contraction; the reference for contract3.
inline tt::Tensor3 contract3_naive(const tt::Matrix& a, const tt::Tensor3& b,
                                   const tt::Matrix& c) {
  tt::Tensor3 out(a.rows(), b.n2(), c.cols());
  for (tt::Index i = 0; i < out.n1(); ++i)
    for (tt::Index j = 0; j < out.n2(); ++j)
      for (tt::Index k = 0; k < out.n3(); ++k) {
        double sum = 0.0;
        for (tt::Index p = 0; p < b.n1(); ++p)
          for (tt::Index q = 0; q < b.n3(); ++q) sum += a(i, p) * b(p, j, q) * c(q, k);
        out(i, j, k) = sum;
      }
  return out;
}

inline double rel_err(const tt::Tensor3& got, const tt::Tensor3& want) {
  const double scale = tt::norm(want);
  return tt::norm(got - want) / (scale > 0 ? scale : 1.0);
}

inline double rel_err(const tt::Matrix& got, const tt::Matrix& want) {
  const double scale = want.norm();
  return (got - want).norm() / (scale > 0 ? scale : 1.0);
}

inline tt::Matrix random_stiefel(tt::Index n, tt::Index p, tt::NormalRng& rng) {
  return tt::orthonormal_columns(tt::gaussian_matrix(n, p, rng));
}

inline tt::CanonicalTtPair random_point(tt::Dims3 dims, tt::Index r1, tt::Index r2,
                                        std::uint64_t seed) {
  auto [tensor, cores] = tt::random_tt(dims, r1, r2, seed);
  (void)tensor;
  return tt::canonicalize(cores);
}

// Random parameters satisfying all orthogonality conditions at x.
inline tt::TangentParams random_params(const tt::CanonicalTtPair& x, tt::Index s1, tt::Index s2,
                                       tt::NormalRng& rng) {
  const tt::Dims3 d = x.dims();
  const tt::Index r1 = x.r1();
  const tt::Index r2 = x.r2();
  tt::TangentParams p;
  std::tie(p.u1, p.v3) = tt::random_admissible_frames(x, s1, s2, rng);
  p.w1 = tt::apply_proj_perp(x.q1, tt::gaussian_matrix(d.n1, r1, rng));
  p.w2 = tt::gaussian_tensor(tt::Dims3{r1, d.n2, r2}, rng);
  p.z2 = tt::gaussian_tensor(tt::Dims3{s1, d.n2, s2}, rng);
  const tt::Matrix w3_raw = tt::gaussian_matrix(r2, d.n3, rng);
  p.w3 = w3_raw - (w3_raw * x.p3.transpose()) * x.p3;
  p.u2 = tt::fold_right(
      tt::apply_proj_perp(x.q2.unfold_right(), tt::gaussian_matrix(r1 * d.n2, s2, rng)),
      tt::Dims3{r1, d.n2, s2});
  const tt::Matrix p2l = x.p2.unfold_left();
  const tt::Matrix v2_raw = tt::gaussian_matrix(s1, d.n2 * r2, rng);
  p.v2 = tt::fold_left(v2_raw - (v2_raw * p2l.transpose()) * p2l, tt::Dims3{s1, d.n2, r2});
  return p;
}

// The six assembly terms, built directly so tests can probe them one by one.
inline std::vector<tt::Tensor3> assembly_terms(const tt::TangentParams& p,
                                               const tt::CanonicalTtPair& x) {
  std::vector<tt::Tensor3> terms;
  terms.push_back(tt::contract3(p.w1, x.p2, x.p3));
  terms.push_back(tt::contract3(x.q1, x.q2, p.w3));
  terms.push_back(tt::contract3(x.q1, p.w2, x.p3));
  terms.push_back(tt::contract3(p.u1, p.v2, x.p3));
  terms.push_back(tt::contract3(x.q1, p.u2, p.v3));
  terms.push_back(tt::contract3(p.u1, p.z2, p.v3));
  return terms;
}
