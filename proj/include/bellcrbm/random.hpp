#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace bellcrbm {

/// Seeded random stream. Draws are built from raw mt19937_64 output with
/// fixed arithmetic, so a given seed yields the same sequence on every
/// platform (std:: distributions are not used for that reason).
///
/// Splitting rule: the child stream `split(k)` is seeded with
/// splitmix64(seed ^ splitmix64(k + 1)). Children depend only on the parent
/// seed and k, never on how far the parent has advanced.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Standard normal via Box-Muller; consumes two uniforms per call.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bellcrbm
