#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace fairgen {

/// Seeded random source with platform-independent draws.
///
/// std::mt19937_64 is bit-exact across standard libraries, but the standard
/// distributions are not, so the transforms below are written out to keep
/// persisted runs reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  /// Standard normal via Box-Muller (no cached second draw).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a parent seed and a purpose tag.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index = 0);

}  // namespace fairgen
