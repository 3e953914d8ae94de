#pragma once

#include <cstdint>

namespace govgame {

// Deterministic, platform-independent RNG used wherever results must be
// reproducible from a seed (censuses, agent simulations, sweeps).
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits; identical on every platform.
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); n must be > 0. Rejection-free modulo is fine
  // for the small n used here (population sizes, role counts).
  std::uint64_t below(std::uint64_t n) { return next() % n; }
};

// Independent stream for (seed, index): sample index k gives the same values
// no matter which thread draws it.
inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mixer(seed ^ (0x9E3779B97F4A7C15ULL + index * 0xD1B54A32D192ED03ULL));
  const std::uint64_t a = mixer.next();
  const std::uint64_t b = mixer.next();
  return SplitMix64(a ^ (b << 1));
}

}  // namespace govgame
