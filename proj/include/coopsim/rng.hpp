#pragma once

#include <cstdint>
#include <random>

namespace coopsim {

// Deterministic 64-bit generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; every sampler below maps raw words to
// values without going through <random> distributions, which are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent substream `stream` of a run seeded with `seed`.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer on {0, ..., upper} (unbiased rejection).
  std::uint64_t uniform_int(std::uint64_t upper) {
    if (upper == ~std::uint64_t{0}) return next_u64();
    const std::uint64_t range = upper + 1;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % range;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  static constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace coopsim
