#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "runclust/runs.hpp"
#include "runclust/series.hpp"

namespace runclust {

/// Homogeneous Poisson process, events per second.
struct PoissonLaw {
  double rate = 1.0;
};

/// Events at start + phase + k*period.
struct PeriodicLaw {
  double period = 1.0;
  double phase = 0.0;
};

/// Two periodic trains taking turns: the window is cut into consecutive
/// regimes of length `regime`; even regimes carry train 1, odd regimes
/// train 2. With very different periods the interevent times are globally
/// bimodal but locally constant. regime <= 0 means window/10.
struct MixedPeriodicLaw {
  double period1 = 1.0;
  double period2 = 100.0;
  double phase1 = 0.0;
  double phase2 = 0.0;
  double regime = 0.0;
};

inline constexpr double kFractalCutoffRatio = 1e7;

/// Renewal process with i.i.d. truncated-Pareto interevent times on
/// [min_gap, min_gap*cutoff_ratio]. The tail exponent is looked up in a
/// shipped calibration table so that the fitted AF slope over
/// fractal_scaling_range() equals `alpha`.
struct FractalRenewalLaw {
  double alpha = 0.5;
  double min_gap = 1.0;
  double cutoff_ratio = kFractalCutoffRatio;
  /// Uses this tail exponent directly instead of the calibration lookup.
  std::optional<double> tail_exponent;
};

/// Poisson cluster process: cluster starts at `cluster_rate`; each cluster
/// holds a geometric number of events (mean `mean_cluster_size` >= 1)
/// separated by exponential gaps at `in_cluster_rate`.
struct BurstyLaw {
  double cluster_rate = 1.0;
  double in_cluster_rate = 10.0;
  double mean_cluster_size = 5.0;
};

using SynthKind = std::variant<PoissonLaw, PeriodicLaw, MixedPeriodicLaw,
                               FractalRenewalLaw, BurstyLaw>;

/// Geometric run lengths: P(L = m) = (1 - q) q^(m - 1).
struct GeometricMarks {
  double q = 0.5;
};

struct SynthSpec {
  SynthKind kind = PoissonLaw{};
  double window = 0.0;  // seconds
  std::uint64_t seed = 0;
  GeometricMarks marks;
  double start = 0.0;  // epoch seconds
  double dt = 1.0;     // recorded on the generated process
  std::string station_id = "synthetic";

  /// Throws InvalidArgument for non-positive rates, periods or window.
  void validate() const;
};

std::string_view kind_name(const SynthKind& kind);

/// Event times per the named law inside [start, start + window), marks
/// i.i.d. from spec.marks. Deterministic per seed.
MarkedPointProcess generate(const SynthSpec& spec);

/// Moves events onto the dt grid (floor) and makes runs renderable: a run
/// must end at least one sample before the next run starts, so colliding
/// marks are redrawn from `marks`; a run cut by the end of the grid is
/// truncated. Throws DataError when two events share or touch a slot, or
/// when redraws keep colliding.
MarkedPointProcess snap_to_grid(const MarkedPointProcess& pp, std::int64_t dt,
                                const GeometricMarks& marks,
                                std::uint64_t seed);

/// Renders a grid-aligned process: extreme_level during runs, base_level
/// elsewhere.
SampledSeries render_series(const MarkedPointProcess& gridded,
                            double base_level, double extreme_level);

/// generate -> snap_to_grid -> render_series.
SampledSeries generate_series(const SynthSpec& spec, std::int64_t dt,
                              double base_level, double extreme_level);

/// The process rendered by generate_series, i.e. what extract_runs should
/// recover from that series.
MarkedPointProcess generate_gridded(const SynthSpec& spec, std::int64_t dt);

/// Tail exponent gamma (density ~ x^-(gamma+1)) for a target AF slope.
/// Throws InvalidArgument outside the calibrated range.
double fractal_tail_exponent(double alpha);

/// Calibrated alpha range [lo, hi].
std::pair<double, double> fractal_alpha_range();

/// One row of the shipped calibration table.
struct FractalCalibrationRow {
  double gamma;
  double alpha;
};
const std::vector<FractalCalibrationRow>& fractal_calibration_table();

/// Expected interevent time of the truncated Pareto law with exponent gamma.
double truncated_pareto_mean(double gamma, double lo, double hi);

/// Expected interevent time of the law at its calibrated exponent.
double fractal_mean_gap(const FractalRenewalLaw& law);

/// [10*min_gap, 1e4*min_gap]: the range the calibration table was fitted on.
std::pair<double, double> fractal_scaling_range(const FractalRenewalLaw& law);

}  // namespace runclust
