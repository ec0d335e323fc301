#include "runclust/allan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "runclust/error.hpp"
#include "runclust/io.hpp"

namespace runclust {
namespace {

// Window k holds offsets with k*tau <= offset < (k+1)*tau, each product
// rounded once. A reciprocal multiply gives a guess that is off by at most
// one; the fix-up makes the result exact without a division per event.
struct WindowIndex {
  double tau;
  double inv;
  explicit WindowIndex(double t) : tau(t), inv(1.0 / t) {}
  std::int64_t operator()(double offset) const {
    auto k = static_cast<std::int64_t>(offset * inv);
    while (k > 0 && static_cast<double>(k) * tau > offset) --k;
    while (static_cast<double>(k + 1) * tau <= offset) ++k;
    return k;
  }
};

/// Complete windows in [0, span): the largest n with n*tau <= span.
std::int64_t window_count(double span, double tau) {
  return WindowIndex(tau)(span);
}

double af_from_moments(std::int64_t diff_sq_sum, std::int64_t total,
                       std::int64_t n_windows) {
  const double mean_sq_diff =
      static_cast<double>(diff_sq_sum) / static_cast<double>(n_windows - 1);
  const double mean_count =
      static_cast<double>(total) / static_cast<double>(n_windows);
  return mean_sq_diff / (2.0 * mean_count);
}

#if defined(__x86_64__) && defined(__ELF__) && \
    (defined(__clang__) ? __clang_major__ >= 14 : defined(__GNUC__))
#define RUNCLUST_AVX2_CLONE __attribute__((target_clones("avx2", "default")))
#else
#define RUNCLUST_AVX2_CLONE
#endif

/// Window keys for offsets below 2^31 windows, where the reciprocal guess is
/// off by at most one and a single fix-up step each way is exact. The result
/// does not depend on the instruction set, so an AVX2 clone is safe.
RUNCLUST_AVX2_CLONE
void window_keys(const double* __restrict times, std::size_t count,
                 double window_start, double tau, double inv,
                 std::int32_t* __restrict out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double offset = times[i] - window_start;
    auto k = static_cast<std::int32_t>(offset * inv);
    k -= static_cast<std::int32_t>(static_cast<double>(k) * tau > offset);
    k += static_cast<std::int32_t>(static_cast<double>(k + 1) * tau <= offset);
    out[i] = k;
  }
}

/// Accumulates sum c^2 and sum c_k c_{k+1} from sorted window keys without
/// data-dependent branches (keys change at almost every event when tau is
/// small, so a grouping branch mispredicts). sum c^2 is sum (2r - 1) over
/// each event's rank r in its window; every event of window k adds c_{k-1}
/// to the cross term.
template <typename Key>
void scan_ranks(const std::vector<Key>& keys, std::int64_t& sum_sq,
                std::int64_t& cross) {
  Key last_k = -2;
  std::int64_t rank = 0;
  std::int64_t before = 0;  // count of the previous occupied window
  std::int64_t adjacent = 0;
  for (const Key k : keys) {
    const bool same = k == last_k;
    before = same ? before : rank;
    adjacent = same ? adjacent : static_cast<std::int64_t>(k == last_k + 1);
    rank = same ? rank + 1 : 1;
    sum_sq += 2 * rank - 1;
    cross += adjacent * before;
    last_k = k;
  }
}

}  // namespace

std::string_view to_string(AfUndefined reason) {
  switch (reason) {
    case AfUndefined::None: return "";
    case AfUndefined::TooFewWindows: return "fewer than 2 complete windows";
    case AfUndefined::TooFewEvents: return "fewer than 2 events in complete windows";
    case AfUndefined::ZeroMeanCount: return "zero mean count";
  }
  return "?";
}

CountingProcess counting_process(const MarkedPointProcess& pp, double tau) {
  if (!(tau >= pp.dt)) {
    throw InvalidArgument("timescale " + format_number(tau) +
                          " s is below the sampling interval");
  }
  const std::int64_t n = window_count(pp.span(), tau);
  if (n < 2) {
    throw InvalidArgument("timescale " + format_number(tau) +
                          " s leaves fewer than 2 complete windows");
  }
  CountingProcess cp;
  cp.tau = tau;
  cp.counts.assign(static_cast<std::size_t>(n), 0);
  const WindowIndex index(tau);
  for (const auto& e : pp.events) {
    const double offset = e.time - pp.window_start;
    if (offset < 0.0) continue;
    const std::int64_t k = index(offset);
    if (k >= n) break;
    ++cp.counts[static_cast<std::size_t>(k)];
  }
  return cp;
}

double allan_factor(std::span<const std::int64_t> counts) {
  if (counts.size() < 2) {
    throw InsufficientData("Allan Factor needs at least 2 windows");
  }
  std::int64_t total = 0;
  std::int64_t diff_sq = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    total += counts[k];
    if (k > 0) {
      const std::int64_t d = counts[k] - counts[k - 1];
      diff_sq += d * d;
    }
  }
  if (total == 0) {
    throw InsufficientData("Allan Factor undefined: zero mean count");
  }
  return af_from_moments(diff_sq, total,
                         static_cast<std::int64_t>(counts.size()));
}

AfValue allan_factor_sparse(std::span<const double> sorted_times,
                            double window_start, double span, double tau) {
  const std::int64_t n = window_count(span, tau);
  if (n < 2) return {0.0, AfUndefined::TooFewWindows};
  const WindowIndex index(tau);

  std::int64_t total = 0;
  std::int64_t sum_sq = 0;
  std::int64_t cross = 0;
  std::int64_t first = 0;
  std::int64_t last = 0;
  std::int64_t prev_k = -2;
  std::int64_t prev_c = 0;

  auto add = [&](std::int64_t k, std::int64_t c) {
    total += c;
    sum_sq += c * c;
    if (k == prev_k + 1) cross += c * prev_c;
    if (k == 0) first = c;
    if (k == n - 1) last = c;
    prev_k = k;
    prev_c = c;
  };

  auto it = std::partition_point(sorted_times.begin(), sorted_times.end(),
                                 [&](double t) { return t - window_start < 0.0; });
  const auto end = sorted_times.end();
  const auto remaining = static_cast<double>(end - it);
  if (static_cast<double>(n) * std::log2(remaining + 2.0) * 4.0 < remaining) {
    // Few windows: locate each window's end by binary search with the same
    // index predicate, so counts match the per-event path exactly. A search
    // step costs several times a step of the key scan, hence the factor.
    for (std::int64_t k = 0; k < n && it != end; ++k) {
      const auto stop = std::partition_point(it, end, [&](double t) {
        return index(t - window_start) <= k;
      });
      if (stop != it) add(k, stop - it);
      it = stop;
    }
  } else {
    // Many windows: index every event, then scan the keys.
    const auto stop = std::partition_point(it, end, [&](double t) {
      return index(t - window_start) < n;
    });
    total = stop - it;
    first = std::partition_point(it, stop, [&](double t) {
              return index(t - window_start) < 1;
            }) - it;
    last = stop - std::partition_point(it, stop, [&](double t) {
             return index(t - window_start) < n - 1;
           });
    const auto count = static_cast<std::size_t>(stop - it);
    if (n < std::numeric_limits<std::int32_t>::max()) {
      thread_local std::vector<std::int32_t> keys;
      keys.resize(count);
      window_keys(sorted_times.data() + (it - sorted_times.begin()), count,
                  window_start, index.tau, index.inv, keys.data());
      scan_ranks(keys, sum_sq, cross);
    } else {
      std::vector<std::int64_t> keys(count);
      for (std::size_t i = 0; i < count; ++i) {
        keys[i] = index(it[static_cast<std::ptrdiff_t>(i)] - window_start);
      }
      scan_ranks(keys, sum_sq, cross);
    }
  }

  if (total == 0) return {0.0, AfUndefined::ZeroMeanCount};
  if (total < 2) return {0.0, AfUndefined::TooFewEvents};
  // sum_{k<n-1} (N_{k+1} - N_k)^2 expanded over occupied windows only.
  const std::int64_t diff_sq =
      2 * sum_sq - first * first - last * last - 2 * cross;
  return {af_from_moments(diff_sq, total, n), AfUndefined::None};
}

std::optional<double> AfCurve::at(double tau) const {
  const auto it = std::lower_bound(taus.begin(), taus.end(), tau);
  if (it == taus.end() || *it != tau) return std::nullopt;
  return af[static_cast<std::size_t>(it - taus.begin())];
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw InvalidArgument("geometric grid needs 0 < lo < hi and >= 2 points");
  }
  std::vector<double> grid(points);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(points - 1);
  grid.front() = lo;
  for (std::size_t i = 1; i + 1 < points; ++i) {
    grid[i] = std::exp(log_lo + step * static_cast<double>(i));
  }
  grid.back() = hi;
  return grid;
}

std::vector<double> default_tau_grid(const MarkedPointProcess& pp,
                                     std::size_t points) {
  const double lo = 2.0 * pp.dt;
  const double hi = pp.span() / 10.0;
  if (!(hi > lo)) {
    throw InsufficientData("observation window too short for a timescale grid "
                           "(span/10 must exceed 2*dt)");
  }
  return geometric_grid(lo, hi, points);
}

AfCurve af_curve(const MarkedPointProcess& pp, std::span<const double> grid,
                 int min_length) {
  if (grid.empty()) throw InvalidArgument("empty timescale grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= pp.dt)) {
      throw InvalidArgument("timescale " + format_number(grid[i]) +
                            " s is below the sampling interval");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidArgument("timescale grid must be strictly ascending");
    }
  }
  std::vector<double> times;
  times.reserve(pp.events.size());
  for (const auto& e : pp.events) times.push_back(e.time);

  AfCurve curve;
  curve.min_length = min_length;
  if (pp.threshold) curve.percentile = pp.threshold->percentile;
  for (double tau : grid) {
    const AfValue v =
        allan_factor_sparse(times, pp.window_start, pp.span(), tau);
    if (v.defined()) {
      curve.taus.push_back(tau);
      curve.af.push_back(v.af);
    } else {
      curve.omitted.push_back({tau, v.reason});
    }
  }
  return curve;
}

PowerLawFit fit_power_law(const AfCurve& curve,
                          std::pair<double, double> range, double epsilon) {
  const auto [lo, hi] = range;
  if (!(lo > 0.0) || !(hi > lo)) {
    throw InvalidArgument("power-law fit range must satisfy 0 < lo < hi");
  }
  PowerLawFit fit;
  fit.fit_lo = lo;
  fit.fit_hi = hi;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < curve.taus.size(); ++i) {
    const double tau = curve.taus[i];
    if (tau < lo || tau > hi) continue;
    if (!(curve.af[i] > 1.0 + epsilon)) {
      ++fit.n_excluded;
      continue;
    }
    xs.push_back(std::log(tau));
    ys.push_back(std::log(curve.af[i] - 1.0));
  }
  fit.n_points = xs.size();
  if (xs.size() < kPowerLawMinPoints) {
    throw InsufficientData("power-law fit needs at least " +
                           std::to_string(kPowerLawMinPoints) +
                           " points with AF > 1+eps in range, have " +
                           std::to_string(xs.size()));
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }
  fit.alpha = slope;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.scaling_detected = slope > 0.0;
  fit.tau1 = fit.scaling_detected ? std::exp(-intercept / slope)
                                  : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

std::pair<double, double> default_fit_range(const AfCurve& curve) {
  if (curve.taus.empty()) {
    throw InsufficientData("no defined AF points to fit");
  }
  const double lo = curve.taus.front();
  const double hi = curve.taus.back();
  if (hi / lo <= 100.0) return {lo, hi};
  const double centre = std::sqrt(lo * hi);
  return {centre / 10.0, centre * 10.0};
}

std::vector<DeparturePoint> departure(const AfCurve& curve, const AfBand& band,
                                      double tau_cutoff) {
  std::vector<DeparturePoint> out;
  for (std::size_t i = 0; i < curve.taus.size(); ++i) {
    const double tau = curve.taus[i];
    const auto it = std::lower_bound(band.taus.begin(), band.taus.end(), tau);
    if (it == band.taus.end() || *it != tau) {
      throw InvalidArgument("grid mismatch: timescale " + format_number(tau) +
                            " s is not on the band grid");
    }
    if (!(tau > tau_cutoff)) continue;
    const auto& upper = band.hi[static_cast<std::size_t>(it - band.taus.begin())];
    if (!upper) continue;
    out.push_back({tau, curve.af[i] - *upper});
  }
  return out;
}

std::string departure_surface_to_csv(std::span<const DepartureRow> rows) {
  std::string out = "station_id,height_m,tau_seconds,dp\n";
  for (const auto& r : rows) {
    out += r.station_id;
    out += ',';
    out += format_number(r.height_m);
    out += ',';
    out += format_number(r.tau);
    out += ',';
    out += format_number(r.dp);
    out += '\n';
  }
  return out;
}

std::string af_table_to_csv(const AfCurve& curve, const AfBand& band,
                            double tau_cutoff) {
  std::string out = "tau_seconds,af,band_lo,band_hi,dp,n_samples\n";
  for (std::size_t i = 0; i < band.taus.size(); ++i) {
    const double tau = band.taus[i];
    const auto af = curve.at(tau);
    out += format_number(tau);
    out += ',';
    if (af) out += format_number(*af);
    out += ',';
    if (band.lo[i]) out += format_number(*band.lo[i]);
    out += ',';
    if (band.hi[i]) out += format_number(*band.hi[i]);
    out += ',';
    if (af && band.hi[i] && tau > tau_cutoff) {
      out += format_number(*af - *band.hi[i]);
    }
    out += ',';
    out += std::to_string(band.n_samples[i]);
    out += '\n';
  }
  return out;
}

}  // namespace runclust
