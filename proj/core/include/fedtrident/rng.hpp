#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace fedtrident {

// Deterministic random source. A (seed, stream) pair fully determines the
// draw sequence; every logical consumer (a client in a round, a data
// generator, the selection step) gets its own stream so execution order and
// thread count cannot change what anyone sees.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream)
      : gen_(mix(mix(seed) ^ stream)) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, bound). bound must be >= 1.
  std::uint64_t bounded(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via the Marsaglia polar method (pinned algorithm, no
  // reliance on library distribution internals).
  double normal() {
    for (;;) {
      double u = 2.0 * uniform01() - 1.0;
      double v = 2.0 * uniform01() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        return u * std::sqrt(-2.0 * std::log(s) / s);
      }
    }
  }

  // Fisher-Yates shuffle.
  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::uint64_t j = bounded(i);
      std::swap(first[i - 1], first[j]);
    }
  }

  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

// Stable stream ids for the simulation's RNG fan-out.
namespace stream {
constexpr std::uint64_t kTrainData = 1;
constexpr std::uint64_t kTestData = 2;
constexpr std::uint64_t kPartition = 3;
constexpr std::uint64_t kAttackers = 4;
constexpr std::uint64_t kModelInit = 5;
constexpr std::uint64_t kSelection = 6;
constexpr std::uint64_t kLocalTraining = 7;
constexpr std::uint64_t kFlameNoise = 8;
constexpr std::uint64_t kValidationSplit = 9;
}  // namespace stream

inline std::uint64_t derive_stream(std::uint64_t purpose, std::uint64_t a = 0,
                                   std::uint64_t b = 0) {
  std::uint64_t h = SeededRng::mix(purpose);
  h = SeededRng::mix(h ^ a);
  h = SeededRng::mix(h ^ b);
  return h;
}

}  // namespace fedtrident
