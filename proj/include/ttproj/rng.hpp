#pragma once

// Seeded, portable random number generation. All randomness in the library
// flows through NormalRng: a std::mt19937_64 (bit-exact across platforms by
// the C++ standard) combined with a Box-Muller transform for standard normal
// draws. Independent streams are derived from (seed, stream id) with
// SplitMix64 so that work split across streams is reproducible regardless of
// scheduling.

#include "ttproj/tensor3.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ttproj {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for sub-stream `stream_id` of a run keyed by `seed`.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x9E3779B97F4A7C15ull));
}

class NormalRng {
 public:
  explicit NormalRng(std::uint64_t seed) : gen_(seed) {}

  static NormalRng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return NormalRng(derive_stream(seed, stream_id));
  }

  std::uint64_t raw() { return gen_(); }

  // Uniform double in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal draw via Box-Muller; pairs are consumed alternately.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Matrix with iid standard normal entries, filled column by column.
inline Matrix gaussian_matrix(Index rows, Index cols, NormalRng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

// Tensor with iid standard normal entries, filled in buffer order.
inline Tensor3 gaussian_tensor(Dims3 dims, NormalRng& rng) {
  Tensor3 t(dims);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = rng.normal();
  return t;
}

}  // namespace ttproj
