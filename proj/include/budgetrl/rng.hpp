#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace budgetrl {

// splitmix64 step; used to derive independent stream seeds from one master
// seed so that consumers (task generation, rollouts, evaluation) never share
// state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

// Deterministic RNG wrapper. mt19937_64 output is fully specified by the
// standard, and the uniform helpers below avoid std::*_distribution, whose
// algorithms are implementation-defined; sequences are therefore identical
// across platforms and standard libraries for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi], unbiased via rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (range == 0) return static_cast<std::int64_t>(engine_());  // full span
    const std::uint64_t limit = ~0ull - (~0ull % range);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return lo + static_cast<std::int64_t>(x % range);
  }

  // Categorical draw from probabilities that sum to ~1; walks the CDF in
  // index order so results are reproducible bit-for-bit.
  int categorical(std::span<const double> probs) {
    const double u = uniform_double();
    double cum = 0.0;
    for (std::size_t v = 0; v + 1 < probs.size(); ++v) {
      cum += probs[v];
      if (u < cum) return static_cast<int>(v);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace budgetrl
