#include "runclust/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "runclust/error.hpp"
#include "runclust/parallel.hpp"
#include "runclust/quantile.hpp"
#include "runclust/rng.hpp"
#include "runclust/stats.hpp"

namespace runclust {
namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

struct Workspace {
  std::vector<double> draws;
  std::vector<std::size_t> buckets;
  std::vector<double> times;
  std::vector<double> intervals;
};

// Sorted uniform times over [start, start + span). Uniform draws are bucket
// sorted in linear time; the map to times is monotone, so the result equals
// a plain sort. Redraws in the (practically impossible) event of a tie so
// times stay strictly increasing.
void draw_times(Rng& rng, double start, double span, std::size_t n,
                Workspace& ws) {
  auto& u = ws.draws;
  auto& out = ws.times;
  auto& offsets = ws.buckets;
  u.resize(n);
  out.resize(n);
  const auto scale = static_cast<double>(n);
  while (true) {
    for (auto& x : u) x = rng.uniform01();
    offsets.assign(n + 1, 0);
    for (const double x : u) {
      ++offsets[std::min(static_cast<std::size_t>(x * scale), n - 1) + 1];
    }
    for (std::size_t b = 1; b <= n; ++b) offsets[b] += offsets[b - 1];
    for (const double x : u) {
      out[offsets[std::min(static_cast<std::size_t>(x * scale), n - 1)]++] = x;
    }
    // Elements only move within their bucket, a few places on average.
    for (std::size_t i = 1; i < n; ++i) {
      const double x = out[i];
      std::size_t j = i;
      for (; j > 0 && out[j - 1] > x; --j) out[j] = out[j - 1];
      out[j] = x;
    }
    for (auto& t : out) t = start + t * span;
    if (std::adjacent_find(out.begin(), out.end()) == out.end()) return;
  }
}

struct SweepResult {
  std::vector<double> cv;
  std::vector<double> lv;
  std::vector<double> af;  // n_surrogates x grid, row-major; NaN = undefined
};

SweepResult sweep(const MarkedPointProcess& pp, std::span<const double> grid,
                  const SurrogateConfig& config, bool scalars) {
  const std::size_t n_surr = config.n_surrogates;
  const std::size_t n_grid = grid.size();
  SweepResult res;
  if (scalars) {
    res.cv.assign(n_surr, kUndefined);
    res.lv.assign(n_surr, kUndefined);
  }
  res.af.assign(n_surr * n_grid, kUndefined);

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(config.workers), n_surr));
  std::vector<Workspace> spaces(workers);
  parallel_for(n_surr, workers, [&](std::size_t i, unsigned w) {
    Workspace& ws = spaces[w];
    Rng rng(surrogate_seed(config, i));
    draw_times(rng, pp.window_start, pp.span(), pp.events.size(), ws);
    if (scalars) {
      ws.intervals.resize(ws.times.size() - 1);
      for (std::size_t k = 1; k < ws.times.size(); ++k) {
        ws.intervals[k - 1] = ws.times[k] - ws.times[k - 1];
      }
      res.cv[i] = coefficient_of_variation(ws.intervals);
      res.lv[i] = local_coefficient_of_variation(ws.intervals);
    }
    for (std::size_t g = 0; g < n_grid; ++g) {
      const AfValue v =
          allan_factor_sparse(ws.times, pp.window_start, pp.span(), grid[g]);
      if (v.defined()) res.af[i * n_grid + g] = v.af;
    }
  });
  return res;
}

ScalarBand make_scalar_band(Statistic statistic, std::vector<double> values,
                            const SurrogateConfig& config) {
  std::sort(values.begin(), values.end());
  ScalarBand band;
  band.statistic = statistic;
  band.config = config;
  band.n_samples = values.size();
  band.lo = quantile_sorted(values, config.lo_quantile);
  band.hi = quantile_sorted(values, config.hi_quantile);
  return band;
}

AfBand make_af_band(std::span<const double> grid, const std::vector<double>& af,
                    const SurrogateConfig& config) {
  AfBand band;
  band.config = config;
  band.taus.assign(grid.begin(), grid.end());
  band.lo.resize(grid.size());
  band.hi.resize(grid.size());
  band.n_samples.assign(grid.size(), 0);
  std::vector<double> column;
  column.reserve(config.n_surrogates);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    column.clear();
    for (std::size_t i = 0; i < config.n_surrogates; ++i) {
      const double v = af[i * grid.size() + g];
      if (!std::isnan(v)) column.push_back(v);
    }
    band.n_samples[g] = column.size();
    if (column.empty()) continue;
    std::sort(column.begin(), column.end());
    band.lo[g] = quantile_sorted(column, config.lo_quantile);
    band.hi[g] = quantile_sorted(column, config.hi_quantile);
  }
  return band;
}

void validate_grid(const MarkedPointProcess& pp, std::span<const double> grid) {
  if (grid.empty()) throw InvalidArgument("empty timescale grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= pp.dt)) {
      throw InvalidArgument("timescale below the sampling interval");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidArgument("timescale grid must be strictly ascending");
    }
  }
}

void require_events(const MarkedPointProcess& pp, std::size_t n,
                    const char* what) {
  if (pp.events.size() < n) {
    throw InsufficientData(std::string(what) + " needs at least " +
                           std::to_string(n) + " events, have " +
                           std::to_string(pp.events.size()));
  }
}

}  // namespace

std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::Cv: return "Cv";
    case Statistic::Lv: return "Lv";
    case Statistic::AF: return "AF";
  }
  return "?";
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Clustered: return "clustered";
    case Classification::Poissonian: return "poissonian";
    case Classification::QuasiPeriodic: return "quasi-periodic";
  }
  return "?";
}

void SurrogateConfig::validate() const {
  if (n_surrogates < 2) throw InvalidArgument("n_surrogates must be >= 2");
  if (!(lo_quantile > 0.0 && lo_quantile < hi_quantile && hi_quantile < 1.0)) {
    throw InvalidArgument("band quantiles must satisfy 0 < lo < hi < 1");
  }
}

std::uint64_t surrogate_seed(const SurrogateConfig& config, std::size_t index) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(index));
}

MarkedPointProcess poisson_surrogate(const MarkedPointProcess& pp,
                                     std::uint64_t seed) {
  require_events(pp, 2, "a Poisson surrogate");
  Rng rng(seed);
  Workspace ws;
  draw_times(rng, pp.window_start, pp.span(), pp.events.size(), ws);
  const std::vector<double>& times = ws.times;
  std::vector<int> marks;
  marks.reserve(pp.events.size());
  for (const auto& e : pp.events) marks.push_back(e.length);
  rng.shuffle(std::span<int>(marks));

  MarkedPointProcess out = pp;
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.events[i] = {times[i], marks[i]};
  }
  return out;
}

ScalarBand scalar_band(const MarkedPointProcess& pp, Statistic statistic,
                       const SurrogateConfig& config) {
  config.validate();
  if (statistic == Statistic::AF) {
    throw InvalidArgument("scalar_band supports Cv and Lv only");
  }
  require_events(pp, 3, "a Cv/Lv band");
  SweepResult res = sweep(pp, {}, config, true);
  return make_scalar_band(statistic,
                          statistic == Statistic::Cv ? std::move(res.cv)
                                                     : std::move(res.lv),
                          config);
}

AfBand af_band(const MarkedPointProcess& pp, std::span<const double> grid,
               const SurrogateConfig& config) {
  config.validate();
  validate_grid(pp, grid);
  require_events(pp, 2, "an AF band");
  const SweepResult res = sweep(pp, grid, config, false);
  return make_af_band(grid, res.af, config);
}

SurrogateBands surrogate_bands(const MarkedPointProcess& pp,
                               std::span<const double> grid,
                               const SurrogateConfig& config) {
  config.validate();
  validate_grid(pp, grid);
  require_events(pp, 3, "surrogate bands");
  SweepResult res = sweep(pp, grid, config, true);
  SurrogateBands out;
  out.cv = make_scalar_band(Statistic::Cv, std::move(res.cv), config);
  out.lv = make_scalar_band(Statistic::Lv, std::move(res.lv), config);
  out.af = make_af_band(grid, res.af, config);
  return out;
}

}  // namespace runclust
