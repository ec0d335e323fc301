#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "runclust/allan.hpp"
#include "runclust/band.hpp"
#include "runclust/runs.hpp"

namespace runclust {

/// Conditioned homogeneous Poisson surrogate: the same number of events
/// placed i.i.d. uniformly over the observation window and sorted, with the
/// original run lengths randomly permuted. Deterministic per seed.
MarkedPointProcess poisson_surrogate(const MarkedPointProcess& pp,
                                     std::uint64_t seed);

/// Seed used for surrogate number `index` under `config.seed`.
std::uint64_t surrogate_seed(const SurrogateConfig& config, std::size_t index);

/// Cv or Lv evaluated on n_surrogates surrogates; lo/hi are the configured
/// quantiles of that sample. Needs at least 3 events.
ScalarBand scalar_band(const MarkedPointProcess& pp, Statistic statistic,
                       const SurrogateConfig& config);

/// Per-timescale quantiles of surrogate AF values. Undefined surrogate
/// points contribute no sample.
AfBand af_band(const MarkedPointProcess& pp, std::span<const double> grid,
               const SurrogateConfig& config);

struct SurrogateBands {
  ScalarBand cv;
  ScalarBand lv;
  AfBand af;
};

/// All three bands from a single sweep over the same surrogates; equal to
/// calling scalar_band and af_band separately with the same config.
SurrogateBands surrogate_bands(const MarkedPointProcess& pp,
                               std::span<const double> grid,
                               const SurrogateConfig& config);

}  // namespace runclust
