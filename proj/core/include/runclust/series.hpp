#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace runclust {

/// A scalar record on a regular time grid: sample k sits at t0 + k*dt.
///
/// Missing samples are tracked by an explicit mask; the corresponding slot
/// in `values` is meaningless and must not be read.
class SampledSeries {
 public:
  /// `values` and `missing` must have equal, non-zero length; dt > 0; every
  /// non-missing value must be finite and >= 0. Throws DataError otherwise.
  SampledSeries(std::string station_id, std::int64_t t0, std::int64_t dt,
                std::vector<double> values, std::vector<bool> missing);

  const std::string& station_id() const { return station_id_; }
  std::int64_t t0() const { return t0_; }
  std::int64_t dt() const { return dt_; }
  std::size_t size() const { return values_.size(); }
  std::int64_t time_at(std::size_t k) const {
    return t0_ + static_cast<std::int64_t>(k) * dt_;
  }
  bool is_missing(std::size_t k) const { return missing_[k]; }
  double value(std::size_t k) const { return values_[k]; }
  std::size_t missing_count() const { return missing_count_; }
  double gap_fraction() const {
    return static_cast<double>(missing_count_) /
           static_cast<double>(values_.size());
  }
  /// Non-missing values in grid order.
  std::vector<double> present_values() const;

  friend bool operator==(const SampledSeries& a, const SampledSeries& b);

 private:
  std::string station_id_;
  std::int64_t t0_;
  std::int64_t dt_;
  std::vector<double> values_;
  std::vector<bool> missing_;
  std::size_t missing_count_ = 0;
};

struct StationMeta {
  std::string station_id;
  double height_m = 0.0;
  std::optional<std::string> label;
};

/// Reads a `timestamp,value` CSV onto the grid anchored at the first row.
///
/// Timestamps snap to the nearest grid slot when they are strictly within
/// dt/2 of it. Absent slots and empty/NaN values become missing.
SampledSeries parse_series(const std::filesystem::path& path,
                           const std::string& station_id, std::int64_t dt);

/// Same as parse_series but from in-memory CSV text; `source` names the
/// input in error messages.
SampledSeries parse_series_text(const std::string& text,
                                const std::string& station_id,
                                std::int64_t dt,
                                const std::string& source = "<memory>");

/// Serializes every grid slot; missing samples get an empty value field.
std::string series_to_csv(const SampledSeries& series);

/// Reads `station_id,height[,label]` rows.
std::vector<StationMeta> parse_station_meta(const std::filesystem::path& path);
std::vector<StationMeta> parse_station_meta_text(
    const std::string& text, const std::string& source = "<memory>");

}  // namespace runclust
