#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace runclust {

/// SplitMix64 finalizer; used to decorrelate seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of substream `stream` under `master`. Depends only on the pair, so
/// any substream can be generated independently of the others.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// FNV-1a of a string, for mixing identifiers into seeds.
std::uint64_t stable_hash(std::string_view text);

/// 64-bit Mersenne Twister with distribution transforms written out here,
/// because the std:: distributions are not reproducible across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_stream(std::uint64_t master, std::uint64_t stream) {
    return Rng(derive_seed(master, stream));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), unbiased (rejection on the top range).
  std::uint64_t below(std::uint64_t n);

  double exponential(double rate);

  /// P(L = m) = (1 - q) q^(m - 1), m >= 1; q in [0, 1).
  int geometric(double q);

  /// Density proportional to x^-(gamma+1) on [lo, hi], gamma > 0.
  double truncated_pareto(double gamma, double lo, double hi);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace runclust
