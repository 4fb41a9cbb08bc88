#pragma once

#include <cstdint>
#include <random>

namespace errw {

/// Identifiers recorded in every manifest so the random streams can be
/// regenerated elsewhere.
inline constexpr const char* kGeneratorFamily = "mt19937_64";
inline constexpr const char* kUniformConversion = "(u >> 11) * 2^-53";
inline constexpr const char* kSeedDerivation = "splitmix64-finalizer/v1";

/// SplitMix64 output function. A bijection on 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of replica `index` under `master_seed`:
///   mix(master_seed + (index + 1) * 0x9E3779B97F4A7C15)
/// The golden-ratio increment is odd, so the argument is injective in the
/// index modulo 2^64, and mix is a bijection; distinct indices therefore give
/// distinct seeds for every index below 2^64.
constexpr std::uint64_t derive_replica_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64_mix(master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// One independent random stream. The uniform conversion is spelled out
/// rather than delegated to std::uniform_real_distribution, whose output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
    std::uint64_t u;
    do {
      u = engine_();
    } while (u >= limit);
    return u % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace errw
