#include <doctest.h>

#include <cmath>

#include "ddlab/rng.hpp"

using ddlab::Rng;

TEST_CASE("rng: fixed seed reproduces the sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42), d(43);
  CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("rng: split streams are deterministic and distinct") {
  const Rng base(7);
  CHECK(base.split(0).key() == base.split(0).key());
  CHECK(base.split(0).key() != base.split(1).key());
  CHECK(base.split(1).key() != Rng(8).split(1).key());

  // Consuming from the parent does not shift child streams.
  Rng parent(7);
  parent.next_u64();
  CHECK(parent.split(3).key() == base.split(3).key());
}

TEST_CASE("rng: uniforms live in [0, 1) and (0, 1]") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.next_double_open();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("rng: gaussian moments") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("rng: signs are +-1 and roughly balanced") {
  Rng rng(5);
  int plus = 0;
  for (int i = 0; i < 10000; ++i) {
    const double s = rng.next_sign();
    CHECK(std::abs(s) == 1.0);
    if (s > 0) ++plus;
  }
  CHECK(plus > 4700);
  CHECK(plus < 5300);
}
