#include "test_util.hpp"

TEST_CASE("svd_full on simple matrices") {
  tt::Matrix diag = tt::Matrix::Zero(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = 1.0;
  const tt::SvdTriple t = tt::svd_full(diag);
  REQUIRE(t.s[0] == Catch::Approx(2.0).margin(1e-14));
  REQUIRE(t.s[1] == Catch::Approx(1.0).margin(1e-14));

  const tt::SvdTriple z = tt::svd_full(tt::Matrix::Zero(3, 2));
  REQUIRE(z.s.isZero(0));
  REQUIRE((z.u.transpose() * z.u).isIdentity(1e-14));
  REQUIRE((z.v.transpose() * z.v).isIdentity(1e-14));
}

TEST_CASE("svd_full reconstructs a random matrix") {
  tt::NormalRng rng(3);
  const tt::Matrix a = tt::gaussian_matrix(5, 7, rng);
  const tt::SvdTriple t = tt::svd_full(a);
  REQUIRE((a - t.u * t.s.asDiagonal() * t.v.transpose()).norm() <=
          1e-10 * std::max(1.0, a.norm()));
  REQUIRE((t.u.transpose() * t.u - tt::Matrix::Identity(5, 5)).norm() < 1e-12);
  REQUIRE((t.v.transpose() * t.v - tt::Matrix::Identity(5, 5)).norm() < 1e-12);
  for (tt::Index i = 0; i + 1 < t.s.size(); ++i) REQUIRE(t.s[i] >= t.s[i + 1]);

  tt::Matrix bad = a;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(tt::svd_full(bad), std::invalid_argument);
}

TEST_CASE("svd_trunc keeps the leading triples") {
  tt::Matrix a = tt::Matrix::Zero(3, 3);
  a(0, 0) = 3.0;
  a(1, 1) = 2.0;
  a(2, 2) = 1.0;
  const tt::TruncatedSvd t = tt::svd_trunc(a, 1);
  REQUIRE(t.s.size() == 1);
  REQUIRE(t.s[0] == Catch::Approx(3.0).margin(1e-14));
  const double captured = tt::apply_proj(t.u, a).squaredNorm();
  REQUIRE(captured == Catch::Approx(9.0).margin(1e-12));
  REQUIRE(captured >= (1.0 / 3.0) * a.squaredNorm() - 1e-12);

  REQUIRE_THROWS_AS(tt::svd_trunc(a, 4), std::invalid_argument);
}

TEST_CASE("svd_trunc at the exact rank loses nothing") {
  tt::NormalRng rng(5);
  const tt::Matrix a = tt::gaussian_matrix(5, 2, rng) * tt::gaussian_matrix(2, 6, rng);
  const tt::TruncatedSvd t = tt::svd_trunc(a, 2);
  REQUIRE((tt::apply_proj(t.u, a) - a).norm() < 1e-12 * a.norm());
}

TEST_CASE("svd_trunc of a zero matrix yields a usable frame") {
  const tt::TruncatedSvd t = tt::svd_trunc(tt::Matrix::Zero(4, 3), 2);
  REQUIRE(t.s.isZero(0));
  REQUIRE((t.u.transpose() * t.u).isIdentity(1e-14));
  REQUIRE((t.v.transpose() * t.v).isIdentity(1e-14));
}

TEST_CASE("truncated frames dominate random competitors") {
  tt::NormalRng rng(7);
  const tt::Matrix a = tt::gaussian_matrix(6, 2, rng) * tt::gaussian_matrix(2, 4, rng) +
                       tt::gaussian_matrix(6, 2, rng) * tt::gaussian_matrix(2, 4, rng);
  const tt::TruncatedSvd t = tt::svd_trunc(a, 2);
  const double best = tt::apply_proj(t.u, a).norm();
  for (int i = 0; i < 1000; ++i) {
    const tt::Matrix u = random_stiefel(6, 2, rng);
    REQUIRE(best >= tt::apply_proj(u, a).norm() - 1e-10);
  }
}

TEST_CASE("truncation error matches the discarded spectrum") {
  tt::NormalRng rng(9);
  for (int rep = 0; rep < 5; ++rep) {
    const tt::Matrix a = tt::gaussian_matrix(6, 5, rng);
    const tt::Vector s = tt::svd_full(a).s;
    for (tt::Index k = 1; k < 5; ++k) {
      const tt::TruncatedSvd t = tt::svd_trunc(a, k);
      const double err2 = (a - t.u * t.s.asDiagonal() * t.v.transpose()).squaredNorm();
      const double tail2 = s.tail(s.size() - k).squaredNorm();
      REQUIRE(err2 == Catch::Approx(tail2).epsilon(1e-10).margin(1e-12));
    }
  }
}

TEST_CASE("projectors split and annihilate as expected") {
  tt::NormalRng rng(11);
  const tt::Matrix u = random_stiefel(5, 2, rng);
  const tt::Matrix a = tt::gaussian_matrix(5, 3, rng);
  const tt::Matrix onto = tt::apply_proj(u, a);
  const tt::Matrix perp = tt::apply_proj_perp(u, a);
  REQUIRE((onto + perp - a).norm() < 1e-13);
  REQUIRE((tt::apply_proj(u, onto) - onto).norm() < 1e-13);
  REQUIRE(std::abs((onto.array() * perp.array()).sum()) < 1e-12);

  const tt::Matrix full = tt::Matrix::Identity(5, 5);
  REQUIRE((tt::apply_proj(full, a) - a).norm() < 1e-13);
  REQUIRE(tt::apply_proj_perp(full, a).norm() < 1e-13);

  const tt::Matrix in_range = u * tt::gaussian_matrix(2, 3, rng);
  REQUIRE(tt::apply_proj_perp(u, in_range).norm() < 1e-12);

  REQUIRE_THROWS_AS(tt::apply_proj(tt::gaussian_matrix(5, 2, rng) * 2.0, a),
                    std::invalid_argument);
}

TEST_CASE("orth_complement produces an orthogonal completion") {
  tt::Matrix e1 = tt::Matrix::Zero(2, 1);
  e1(0, 0) = 1.0;
  const tt::Matrix q = tt::orth_complement(e1);
  REQUIRE(std::abs(std::abs(q(1, 0)) - 1.0) < 1e-14);
  REQUIRE(std::abs(q(0, 0)) < 1e-14);

  const tt::Matrix eye_first = tt::Matrix::Identity(5, 2);
  const tt::Matrix comp = tt::orth_complement(eye_first);
  REQUIRE((comp.transpose() * eye_first).norm() < 1e-13);

  tt::NormalRng rng(13);
  const tt::Matrix u = random_stiefel(5, 2, rng);
  const tt::Matrix qc = tt::orth_complement(u);
  REQUIRE(qc.rows() == 5);
  REQUIRE(qc.cols() == 3);
  REQUIRE((qc.transpose() * u).norm() <= 1e-12);
  REQUIRE((qc.transpose() * qc - tt::Matrix::Identity(3, 3)).norm() <= 1e-12);

  REQUIRE_THROWS_AS(tt::orth_complement(tt::Matrix::Identity(3, 3)), std::invalid_argument);
}
