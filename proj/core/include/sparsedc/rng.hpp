#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sparsedc {

/// Independent random streams derived from the single run seed.
enum class Stream : std::uint64_t {
  PoseSampling = 1,
  SparseSampling = 2,
  SparseNoise = 3,
  EmbedInit = 4,
  LossCheck = 5,
  Synthetic = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// seed_for(base, stream, index) = splitmix64(base ^ splitmix64(stream * 2^32 + index)).
/// Each (stream, index) pair gets its own engine, so per-frame work can run in
/// any order and still reproduce the same draws.
inline std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index = 0) {
  return splitmix64(base ^ splitmix64((static_cast<std::uint64_t>(stream) << 32) + index));
}

/// mt19937_64 with distributions written out explicitly; the std:: distributions
/// are implementation-defined, which would break byte-identical outputs across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return lo + static_cast<std::int64_t>(x % range);
  }

  /// Standard normal via Box-Muller (one draw per call, no cached spare).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sparsedc
