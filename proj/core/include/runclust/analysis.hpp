#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "runclust/allan.hpp"
#include "runclust/band.hpp"
#include "runclust/runs.hpp"
#include "runclust/series.hpp"
#include "runclust/stats.hpp"

namespace runclust {

struct TauGridSpec {
  std::optional<double> lo;  // default 2*dt
  std::optional<double> hi;  // default span/10
  std::size_t points = kDefaultGridPoints;
};

std::vector<int> default_l_m_values();  // 1..30

struct AnalysisConfig {
  std::vector<double> percentiles{0.95, 0.975, 0.99};
  std::vector<int> l_m_values = default_l_m_values();
  TauGridSpec tau_grid;
  std::size_t n_surrogates = 1000;
  std::optional<std::uint64_t> seed;
  double lo_quantile = 0.025;
  double hi_quantile = 0.975;
  double dp_cutoff = kDefaultDpCutoffSeconds;
  std::int64_t dt = 600;
  std::size_t min_threshold_samples = kDefaultMinThresholdSamples;
  std::optional<std::pair<double, double>> fit_range;
  unsigned workers = 0;
  std::filesystem::path output_dir;

  /// Throws InvalidArgument on empty lists, out-of-range values or a
  /// missing seed.
  void validate() const;
};

/// Effective configuration as JSON (output_dir is not included, so two runs
/// into different directories echo identical text).
std::string config_to_json(const AnalysisConfig& config);

/// Overlays the keys present in `json_text` onto `base`. Unknown keys are an
/// error.
AnalysisConfig config_from_json(const std::string& json_text,
                                AnalysisConfig base = {});

enum class CellStatus { Ok, InsufficientEvents, UndefinedAf };

std::string_view to_string(CellStatus status);

struct ScalarResult {
  double value = 0.0;
  ScalarBand band;
  Classification classification = Classification::Poissonian;
};

/// Every output of one (percentile, L_m) cell.
struct CellResult {
  double percentile = 0.0;
  int l_m = 1;
  CellStatus status = CellStatus::Ok;
  std::string reason;
  double threshold = 0.0;
  std::size_t n_events = 0;
  std::uint64_t seed = 0;
  std::optional<RunLengthDensity> density;
  std::optional<double> mean_interevent;
  std::optional<ScalarResult> cv;
  std::optional<ScalarResult> lv;
  std::optional<AfCurve> af;
  std::optional<AfBand> af_band;
  std::vector<DeparturePoint> dp;
  std::optional<PowerLawFit> fit;
  std::string fit_note;
};

struct StationReport {
  StationMeta meta;
  std::size_t n_samples = 0;
  double gap_fraction = 0.0;
  std::vector<ThresholdSpec> thresholds;
  /// Run-length density of all runs per percentile, in config order.
  std::vector<std::optional<RunLengthDensity>> densities;
  std::vector<double> tau_grid;
  std::vector<CellResult> cells;
  /// Set when the station could not be analysed at all.
  std::optional<std::string> error;

  bool all_ok() const;
};

/// Seed of the surrogates for one cell, derived from the master seed.
std::uint64_t cell_seed(std::uint64_t master, const std::string& station_id,
                        double percentile, int l_m);

/// Analyses one station over every (percentile, L_m) cell. Cell failures are
/// recorded in the report; a station-level failure (e.g. too few samples
/// for a threshold) throws. Writes per-cell files under
/// output_dir/<station_id>/ when output_dir is set.
StationReport run_station(const SampledSeries& series, const StationMeta& meta,
                          const AnalysisConfig& config);

struct BatchReport {
  std::vector<StationReport> stations;
  std::vector<std::string> warnings;
  /// Cross-station mean run-length density per percentile (config order).
  std::vector<std::optional<RunLengthDensity>> mean_density;

  bool all_ok() const;
};

/// Runs every `<station_id>.csv` in station_dir that has a metadata row,
/// then writes the cross-station products under output_dir.
BatchReport run_batch(const std::filesystem::path& station_dir,
                      const std::filesystem::path& meta_path,
                      const AnalysisConfig& config);

/// Directory name used for a percentile, e.g. "p0.975".
std::string percentile_label(double percentile);

}  // namespace runclust
