#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace fairaudit {

// Reproducible random stream: std::mt19937_64 (its output sequence is fixed
// by the C++ standard) seeded through SplitMix64, with uniform and normal
// variates produced by hand so results do not depend on the standard
// library's distribution implementations. Stream version: 1.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Independent stream for (master, stream, substream); used to give every
  // replication and every purpose its own generator.
  static Rng derive(std::uint64_t master, std::uint64_t stream,
                    std::uint64_t substream = 0) {
    return Rng(mix(mix(master) ^ mix(stream + 0x632be59bd9b4e019ULL)) ^
               mix(substream + 0x2545f4914f6cdd1dULL));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  // Uniform integer in [0, n) by rejection (no modulo bias).
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace fairaudit
