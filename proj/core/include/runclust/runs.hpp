#pragma once

#include <optional>
#include <string>
#include <vector>

#include "runclust/series.hpp"

namespace runclust {

/// Percentile threshold. `percentile` is empty when the value was supplied
/// directly rather than estimated from data.
struct ThresholdSpec {
  std::optional<double> percentile;
  double value = 0.0;
};

/// One run: start time (epoch seconds) and length in samples.
struct ExtremeEvent {
  double time = 0.0;
  int length = 1;

  friend bool operator==(const ExtremeEvent&, const ExtremeEvent&) = default;
};

/// Time-ordered runs observed over the half-open window
/// [window_start, window_end).
struct MarkedPointProcess {
  std::vector<ExtremeEvent> events;
  double window_start = 0.0;
  double window_end = 0.0;
  double dt = 1.0;
  std::string station_id;
  std::optional<ThresholdSpec> threshold;
  double gap_fraction = 0.0;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  double span() const { return window_end - window_start; }
};

inline constexpr std::size_t kDefaultMinThresholdSamples = 100;

/// Empirical percentile of the non-missing values (see quantile_sorted).
ThresholdSpec compute_threshold(
    const SampledSeries& series, double percentile,
    std::size_t min_samples = kDefaultMinThresholdSamples);

/// Several percentiles from one sort of the data.
std::vector<ThresholdSpec> compute_thresholds(
    const SampledSeries& series, const std::vector<double>& percentiles,
    std::size_t min_samples = kDefaultMinThresholdSamples);

/// Maximal blocks of consecutive samples strictly above threshold.value.
/// Missing samples end a run and never belong to one; a run cut by the end
/// of the series keeps its observed length.
MarkedPointProcess extract_runs(const SampledSeries& series,
                                const ThresholdSpec& threshold);

/// Keeps the events with length >= min_length (min_length >= 1).
MarkedPointProcess filter_by_min_length(const MarkedPointProcess& pp,
                                        int min_length);

/// `event_time,run_length` CSV with ISO-8601 times.
std::string events_to_csv(const MarkedPointProcess& pp);
/// JSON sidecar: window, dt, station, threshold, gap fraction, estimator.
std::string events_sidecar_json(const MarkedPointProcess& pp);
/// Rebuilds a process from the CSV text and its sidecar JSON text.
MarkedPointProcess events_from_csv(const std::string& csv_text,
                                   const std::string& sidecar_json);

}  // namespace runclust
