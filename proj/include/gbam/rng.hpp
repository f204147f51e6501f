#pragma once

// Seeded random streams with platform-independent output.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The standard distributions are not, so the variate transforms
// below are spelled out. Each (seed, class, variate kind) triple gets its own
// stream, derived with SplitMix64, so adding a class or a variate kind never
// perturbs the draws of another.

#include <cstdint>
#include <random>

namespace gbam {

enum class VariateKind : std::uint64_t {
  kInterarrival = 1,
  kBandwidth = 2,
  kHolding = 3,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream for one (seed, class, kind) triple.
  static RandomStream for_variate(std::uint64_t seed, std::uint64_t class_index,
                                  VariateKind kind) {
    const std::uint64_t mixed =
        splitmix64(splitmix64(seed) ^ splitmix64((class_index << 8) | static_cast<std::uint64_t>(kind)));
    return RandomStream(mixed);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exponential with the given mean; 0 when mean is 0.
  double exponential(double mean);

  /// Uniform integer on [lo, hi], unbiased (rejection sampling).
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gbam
