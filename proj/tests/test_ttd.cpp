#include "test_util.hpp"

TEST_CASE("tt_svd is exact when the target ranks suffice") {
  tt::NormalRng rng(3);

  // Rank-one tensor from an outer product.
  const tt::Matrix a = tt::gaussian_matrix(4, 1, rng);
  const tt::Tensor3 b = tt::gaussian_tensor(tt::Dims3{1, 3, 1}, rng);
  const tt::Matrix c = tt::gaussian_matrix(1, 5, rng);
  const tt::Tensor3 rank1 = tt::contract3(a, b, c);
  REQUIRE(rel_err(tt::tt_svd(rank1, 1, 1).full(), rank1) < 1e-10);

  // Generated at ranks (2, 2), recovered at targets (2, 2).
  auto [t, cores] = tt::random_tt(tt::Dims3{5, 5, 5}, 2, 2, rng);
  (void)cores;
  REQUIRE(rel_err(tt::tt_svd(t, 2, 2).full(), t) < 1e-10);

  // Full targets are always exact.
  const tt::Tensor3 dense = tt::gaussian_tensor(tt::Dims3{3, 4, 2}, rng);
  REQUIRE(rel_err(tt::tt_svd(dense, 3, 2).full(), dense) < 1e-10);
}

TEST_CASE("tt_svd validates the target ranks") {
  const tt::Tensor3 t(3, 4, 2);
  REQUIRE_THROWS_AS(tt::tt_svd(t, 0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(tt::tt_svd(t, 4, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(tt::tt_svd(t, 1, 3), std::invalid_argument);
}

TEST_CASE("tt_svd truncation never raises the rank above the targets") {
  tt::NormalRng rng(5);
  const tt::Tensor3 dense = tt::gaussian_tensor(tt::Dims3{5, 5, 5}, rng);
  const tt::Ttd d = tt::tt_svd(dense, 2, 2);
  const auto [r1, r2] = tt::tt_rank(d.full(), 1e-10);
  REQUIRE(r1 <= 2);
  REQUIRE(r2 <= 2);
}

TEST_CASE("tt_rank detects the generated ranks") {
  REQUIRE(tt::tt_rank(tt::Tensor3(3, 3, 3), 1e-10) == std::pair<tt::Index, tt::Index>{0, 0});

  tt::NormalRng rng(7);
  const tt::Tensor3 rank1 = tt::contract3(tt::gaussian_matrix(3, 1, rng),
                                          tt::gaussian_tensor(tt::Dims3{1, 3, 1}, rng),
                                          tt::gaussian_matrix(1, 3, rng));
  REQUIRE(tt::tt_rank(rank1, 1e-10) == std::pair<tt::Index, tt::Index>{1, 1});

  auto [t, cores] = tt::random_tt(tt::Dims3{5, 5, 5}, 2, 2, rng);
  (void)cores;
  REQUIRE(tt::tt_rank(t, 1e-10) == std::pair<tt::Index, tt::Index>{2, 2});
}

TEST_CASE("canonicalize satisfies all four orthogonality conditions") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    auto [t, cores] = tt::random_tt(tt::Dims3{5, 5, 5}, 2, 2, seed);
    const tt::CanonicalTtPair x = tt::canonicalize(cores);

    REQUIRE((x.q1.transpose() * x.q1 - tt::Matrix::Identity(2, 2)).norm() <= 1e-12);
    const tt::Matrix q2r = x.q2.unfold_right();
    REQUIRE((q2r.transpose() * q2r - tt::Matrix::Identity(2, 2)).norm() <= 1e-12);
    const tt::Matrix p2l = x.p2.unfold_left();
    REQUIRE((p2l * p2l.transpose() - tt::Matrix::Identity(2, 2)).norm() <= 1e-12);
    REQUIRE((x.p3 * x.p3.transpose() - tt::Matrix::Identity(2, 2)).norm() <= 1e-12);

    REQUIRE(rel_err(tt::contract3(x.q1, x.q2, x.c3), t) < 1e-12);
    REQUIRE(rel_err(tt::contract3(x.c1, x.p2, x.p3), t) < 1e-12);
  }
}

TEST_CASE("canonicalize of an already canonical input changes nothing it shouldn't") {
  auto [t, cores] = tt::random_tt(tt::Dims3{4, 3, 5}, 2, 2, 11u);
  const tt::CanonicalTtPair x = tt::canonicalize(cores);
  const tt::CanonicalTtPair again = tt::canonicalize(tt::Ttd{x.q1, x.q2, x.c3});
  REQUIRE(rel_err(again.full(), t) < 1e-12);
}

TEST_CASE("canonicalize normalizes a rank-one tensor up to sign") {
  tt::NormalRng rng(13);
  tt::Ttd d;
  d.g1 = tt::gaussian_matrix(4, 1, rng);
  d.g2 = tt::gaussian_tensor(tt::Dims3{1, 3, 1}, rng);
  d.g3 = tt::gaussian_matrix(1, 5, rng);
  const tt::CanonicalTtPair x = tt::canonicalize(d);
  const tt::Matrix normalized = d.g1 / d.g1.norm();
  REQUIRE(std::min((x.q1 - normalized).norm(), (x.q1 + normalized).norm()) < 1e-12);
}

TEST_CASE("canonicalize flags nominal ranks above the true TT-rank") {
  tt::NormalRng rng(17);
  tt::Ttd d;
  const tt::Matrix col = tt::gaussian_matrix(4, 1, rng);
  d.g1 = tt::Matrix(4, 2);
  d.g1.col(0) = col;
  d.g1.col(1) = col;  // left unfolding has rank one
  d.g2 = tt::gaussian_tensor(tt::Dims3{2, 3, 2}, rng);
  d.g3 = tt::gaussian_matrix(2, 4, rng);
  try {
    tt::canonicalize(d);
    FAIL("expected RankDeficientError");
  } catch (const tt::RankDeficientError& e) {
    REQUIRE(e.nominal == std::pair<tt::Index, tt::Index>{2, 2});
    REQUIRE(e.detected.first == 1);
  }
}

TEST_CASE("random_tt is deterministic and hits its ranks") {
  auto [t1, c1] = tt::random_tt(tt::Dims3{5, 5, 5}, 2, 2, 42u);
  auto [t2, c2] = tt::random_tt(tt::Dims3{5, 5, 5}, 2, 2, 42u);
  REQUIRE(t1 == t2);
  REQUIRE(c1.g1 == c2.g1);

  auto [r1, cores] = tt::random_tt(tt::Dims3{4, 4, 4}, 1, 1, 19u);
  (void)cores;
  REQUIRE(tt::tt_rank(r1, 1e-10) == std::pair<tt::Index, tt::Index>{1, 1});
}
