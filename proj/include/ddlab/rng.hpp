#pragma once

#include <cmath>
#include <cstdint>

namespace ddlab {

// Counter-based pseudo-random generator built on the SplitMix64 output
// function: draw i of a stream with key s is mix(s + (i+1) * GAMMA).
// Streams are split by hashing the parent key with the child index through
// a second mixer, so replicate r of a run always sees the same numbers no
// matter which order (or thread) computes it.
//
// Gaussians come from the basic Box-Muller transform (two uniforms per
// pair, second value cached), so a fixed seed yields the same sequence on
// every run.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : key_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++counter_) * kGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe to pass through log().
  double next_double_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_double_open();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Rademacher sign in {-1, +1}.
  double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // Independent child stream; deterministic in (parent key, index).
  Rng split(std::uint64_t index) const {
    std::uint64_t z = key_ ^ (0x9FB21C651E98DF25ull + index * kGamma);
    z = (z ^ (z >> 49)) * 0x99BCF6822B23CA35ull;
    z = (z ^ (z >> 24)) * 0x9FB21C651E98DF25ull;
    return Rng(z ^ (z >> 49));
  }

  std::uint64_t key() const { return key_; }

private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr double kPi = 3.14159265358979323846;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ddlab
