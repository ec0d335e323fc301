#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace runclust {

enum class Statistic { Cv, Lv, AF };

std::string_view to_string(Statistic s);

enum class Classification { Clustered, Poissonian, QuasiPeriodic };

std::string_view to_string(Classification c);

struct SurrogateConfig {
  std::size_t n_surrogates = 1000;
  std::uint64_t seed = 0;
  double lo_quantile = 0.025;
  double hi_quantile = 0.975;
  /// Worker threads for the surrogate sweep; 0 means hardware concurrency.
  unsigned workers = 1;

  /// Throws InvalidArgument unless n_surrogates >= 2 and 0 < lo < hi < 1.
  void validate() const;
};

/// Surrogate envelope for a scalar statistic (Cv or Lv).
struct ScalarBand {
  Statistic statistic = Statistic::Cv;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_samples = 0;
  SurrogateConfig config;

  /// Above hi: clustered; below lo: quasi-periodic; otherwise poissonian.
  Classification classify(double value) const {
    if (value > hi) return Classification::Clustered;
    if (value < lo) return Classification::QuasiPeriodic;
    return Classification::Poissonian;
  }
};

/// Per-timescale surrogate envelope of the Allan Factor. A timescale where
/// no surrogate produced a defined AF has empty lo/hi and n_samples == 0.
struct AfBand {
  std::vector<double> taus;
  std::vector<std::optional<double>> lo;
  std::vector<std::optional<double>> hi;
  std::vector<std::size_t> n_samples;
  SurrogateConfig config;
};

}  // namespace runclust
