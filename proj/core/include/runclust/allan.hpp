#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "runclust/band.hpp"
#include "runclust/runs.hpp"

namespace runclust {

/// Event counts in contiguous windows of length tau tiling
/// [window_start, window_start + n_windows*tau). The trailing partial window
/// is dropped.
struct CountingProcess {
  double tau = 0.0;
  std::vector<std::int64_t> counts;

  std::size_t n_windows() const { return counts.size(); }
};

/// Requires tau >= dt and at least two complete windows.
CountingProcess counting_process(const MarkedPointProcess& pp, double tau);

/// Mean squared first difference over twice the mean count. Throws
/// InsufficientData when fewer than two windows or the mean count is zero.
double allan_factor(std::span<const std::int64_t> counts);
inline double allan_factor(const CountingProcess& cp) {
  return allan_factor(cp.counts);
}

/// Why an AF point is undefined, or empty when it is defined.
enum class AfUndefined { None, TooFewWindows, TooFewEvents, ZeroMeanCount };

std::string_view to_string(AfUndefined reason);

struct AfValue {
  double af = 0.0;
  AfUndefined reason = AfUndefined::None;

  bool defined() const { return reason == AfUndefined::None; }
};

/// Allan Factor of sorted event times without materializing the window
/// array: only occupied windows are visited, so the cost is O(events).
/// Gives exactly the same value as allan_factor(counting_process(...)).
AfValue allan_factor_sparse(std::span<const double> sorted_times,
                            double window_start, double span, double tau);

struct OmittedPoint {
  double tau = 0.0;
  AfUndefined reason = AfUndefined::None;
};

struct AfCurve {
  std::vector<double> taus;  // defined points only, ascending
  std::vector<double> af;
  std::vector<OmittedPoint> omitted;
  int min_length = 1;
  std::optional<double> percentile;

  std::optional<double> at(double tau) const;
};

/// Geometric grid of `points` values from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t points);

inline constexpr std::size_t kDefaultGridPoints = 60;

/// From 2*dt to span/10, geometric.
std::vector<double> default_tau_grid(const MarkedPointProcess& pp,
                                     std::size_t points = kDefaultGridPoints);

/// AF at every grid timescale. Throws InvalidArgument for an empty,
/// non-ascending grid or a timescale below dt; undefined points are moved
/// to `omitted`.
AfCurve af_curve(const MarkedPointProcess& pp, std::span<const double> grid,
                 int min_length = 1);

/// AF(tau) = 1 + (tau/tau1)^alpha fitted by least squares on
/// (log tau, log(AF - 1)).
struct PowerLawFit {
  double alpha = 0.0;
  double tau1 = 0.0;  // NaN when no scaling is detected
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  std::size_t n_excluded = 0;  // in range but AF <= 1 + epsilon
  bool scaling_detected = false;
};

inline constexpr double kPowerLawEpsilon = 0.01;
inline constexpr std::size_t kPowerLawMinPoints = 5;

/// Throws InsufficientData when fewer than five usable points remain.
/// A non-positive slope returns scaling_detected == false.
PowerLawFit fit_power_law(const AfCurve& curve, std::pair<double, double> range,
                          double epsilon = kPowerLawEpsilon);

/// The middle two log-decades of the curve's timescales (the whole range
/// when it spans less).
std::pair<double, double> default_fit_range(const AfCurve& curve);

struct DeparturePoint {
  double tau = 0.0;
  double dp = 0.0;
};

inline constexpr double kDefaultDpCutoffSeconds = 200.0 * 60.0;

/// AF minus the band's upper envelope for every tau > cutoff where both are
/// defined. Throws InvalidArgument if a curve timescale is absent from the
/// band grid.
std::vector<DeparturePoint> departure(const AfCurve& curve, const AfBand& band,
                                      double tau_cutoff);

struct DepartureRow {
  std::string station_id;
  double height_m = 0.0;
  double tau = 0.0;
  double dp = 0.0;
};

/// `station_id,height_m,tau_seconds,dp`
std::string departure_surface_to_csv(std::span<const DepartureRow> rows);

/// `tau_seconds,af,band_lo,band_hi,dp,n_samples` over the band grid; empty
/// fields where undefined.
std::string af_table_to_csv(const AfCurve& curve, const AfBand& band,
                            double tau_cutoff);

}  // namespace runclust
