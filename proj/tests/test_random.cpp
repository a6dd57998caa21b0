#include <doctest.h>

#include <cmath>
#include <set>

#include "bellcrbm/random.hpp"

using bellcrbm::Rng;

TEST_CASE("same seed, same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform draws lie in [0, 1) with mean near one half") {
  Rng r(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("normal draws have zero mean and unit variance") {
  Rng r(2);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("index stays below its bound and reaches every value") {
  Rng r(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t k = r.index(7);
    REQUIRE(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("split streams are reproducible and distinct") {
  const Rng parent(123);
  Rng a = parent.split(0), a2 = parent.split(0), b = parent.split(1);
  CHECK(a.seed() == a2.seed());
  CHECK(a.seed() != b.seed());
  CHECK(a.seed() == bellcrbm::splitmix64(123 ^ bellcrbm::splitmix64(1)));
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
  CHECK(same == 0);

  SUBCASE("splitting does not depend on how far the parent has advanced") {
    Rng moved(123);
    for (int i = 0; i < 50; ++i) moved.next_u64();
    CHECK(moved.split(1).seed() == b.seed());
  }
}

TEST_CASE("splitmix64 reference values") {
  // First output of the reference splitmix64 generator seeded with 0.
  CHECK(bellcrbm::splitmix64(0) == 0xE220A8397B1DCDAFULL);
}
