#include "runclust/series.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "runclust/error.hpp"
#include "runclust/io.hpp"
#include "runclust/timeutil.hpp"

namespace runclust {
namespace {

std::string where(const std::string& source, std::size_t line_no) {
  return source + ":" + std::to_string(line_no) + ": ";
}

std::vector<std::string> split_text_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

SampledSeries parse_series_lines(const std::vector<std::string>& lines,
                                 const std::string& station_id,
                                 std::int64_t dt, const std::string& source) {
  if (dt <= 0) throw InvalidArgument("dt must be positive");
  if (lines.empty()) throw DataError(source + ": empty file (no header)");
  {
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2 || header[0] != "timestamp" ||
        header[1] != "value") {
      throw DataError(where(source, 1) +
                      "expected header 'timestamp,value'");
    }
  }

  std::vector<double> values;
  std::vector<bool> missing;
  double t0 = 0.0;
  bool have_t0 = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (is_blank(lines[i])) continue;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 2) {
      throw DataError(where(source, line_no) + "malformed row: expected 2 "
                      "fields, got " + std::to_string(fields.size()));
    }
    double t = 0.0;
    try {
      t = parse_iso8601(fields[0]);
    } catch (const DataError& e) {
      throw DataError(where(source, line_no) + e.what());
    }
    bool is_missing = false;
    double v = 0.0;
    if (fields[1].empty()) {
      is_missing = true;
    } else if (!parse_double(fields[1], v)) {
      throw DataError(where(source, line_no) + "malformed value '" +
                      std::string(fields[1]) + "'");
    } else if (std::isnan(v)) {
      is_missing = true;
    } else if (!std::isfinite(v)) {
      throw DataError(where(source, line_no) + "non-finite value");
    } else if (v < 0.0) {
      throw DataError(where(source, line_no) + "negative value " +
                      std::string(fields[1]));
    }

    if (!have_t0) {
      t0 = std::round(t);
      have_t0 = true;
    }
    const double offset = (t - t0) / static_cast<double>(dt);
    const double slot_f = std::round(offset);
    if (std::abs(offset - slot_f) * 2.0 >= 1.0) {
      throw DataError(where(source, line_no) + "timestamp " +
                      std::string(fields[0]) + " is not on the " +
                      std::to_string(dt) + " s grid");
    }
    if (slot_f < 0.0 ||
        (slot_f < static_cast<double>(values.size()))) {
      if (slot_f >= 0.0 &&
          static_cast<std::size_t>(slot_f) == values.size() - 1) {
        throw DataError(where(source, line_no) + "duplicate timestamp " +
                        std::string(fields[0]));
      }
      throw DataError(where(source, line_no) + "timestamps not sorted at " +
                      std::string(fields[0]));
    }
    const auto slot = static_cast<std::size_t>(slot_f);
    values.resize(slot, 0.0);
    missing.resize(slot, true);
    values.push_back(is_missing ? 0.0 : v);
    missing.push_back(is_missing);
  }
  if (values.empty()) throw DataError(source + ": no data rows");
  return SampledSeries(station_id, static_cast<std::int64_t>(t0), dt,
                       std::move(values), std::move(missing));
}

std::vector<StationMeta> parse_meta_lines(
    const std::vector<std::string>& lines, const std::string& source) {
  if (lines.empty()) throw DataError(source + ": empty file (no header)");
  const auto header = split_csv_line(lines[0]);
  int id_col = -1, height_col = -1, label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "station_id") id_col = static_cast<int>(c);
    if (header[c] == "height") height_col = static_cast<int>(c);
    if (header[c] == "label") label_col = static_cast<int>(c);
  }
  if (id_col < 0) throw DataError(where(source, 1) + "missing column 'station_id'");
  if (height_col < 0) throw DataError(where(source, 1) + "missing column 'height'");

  std::vector<StationMeta> out;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (is_blank(lines[i])) continue;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != header.size()) {
      throw DataError(where(source, line_no) + "malformed row: expected " +
                      std::to_string(header.size()) + " fields");
    }
    StationMeta meta;
    meta.station_id = std::string(fields[static_cast<std::size_t>(id_col)]);
    if (meta.station_id.empty()) {
      throw DataError(where(source, line_no) + "empty station_id");
    }
    const auto h = fields[static_cast<std::size_t>(height_col)];
    if (!parse_double(h, meta.height_m) || !std::isfinite(meta.height_m)) {
      throw DataError(where(source, line_no) + "non-numeric height '" +
                      std::string(h) + "'");
    }
    if (label_col >= 0 && !fields[static_cast<std::size_t>(label_col)].empty()) {
      meta.label = std::string(fields[static_cast<std::size_t>(label_col)]);
    }
    if (!seen.insert(meta.station_id).second) {
      throw DataError(where(source, line_no) + "duplicate station_id '" +
                      meta.station_id + "'");
    }
    out.push_back(std::move(meta));
  }
  return out;
}

}  // namespace

SampledSeries::SampledSeries(std::string station_id, std::int64_t t0,
                             std::int64_t dt, std::vector<double> values,
                             std::vector<bool> missing)
    : station_id_(std::move(station_id)),
      t0_(t0),
      dt_(dt),
      values_(std::move(values)),
      missing_(std::move(missing)) {
  if (dt_ <= 0) throw DataError("series dt must be positive");
  if (values_.empty()) throw DataError("series must have at least one sample");
  if (values_.size() != missing_.size()) {
    throw DataError("series values and missing mask differ in length");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (missing_[k]) {
      values_[k] = 0.0;
      ++missing_count_;
    } else if (!std::isfinite(values_[k]) || values_[k] < 0.0) {
      throw DataError("series value at index " + std::to_string(k) +
                      " is negative or non-finite");
    }
  }
}

std::vector<double> SampledSeries::present_values() const {
  std::vector<double> out;
  out.reserve(values_.size() - missing_count_);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!missing_[k]) out.push_back(values_[k]);
  }
  return out;
}

bool operator==(const SampledSeries& a, const SampledSeries& b) {
  return a.station_id_ == b.station_id_ && a.t0_ == b.t0_ && a.dt_ == b.dt_ &&
         a.missing_ == b.missing_ && a.values_ == b.values_;
}

SampledSeries parse_series(const std::filesystem::path& path,
                           const std::string& station_id, std::int64_t dt) {
  return parse_series_lines(read_lines(path), station_id, dt, path.string());
}

SampledSeries parse_series_text(const std::string& text,
                                const std::string& station_id,
                                std::int64_t dt, const std::string& source) {
  return parse_series_lines(split_text_lines(text), station_id, dt, source);
}

std::string series_to_csv(const SampledSeries& series) {
  std::string out = "timestamp,value\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    out += format_iso8601(static_cast<double>(series.time_at(k)));
    out += ',';
    if (!series.is_missing(k)) out += format_number(series.value(k));
    out += '\n';
  }
  return out;
}

std::vector<StationMeta> parse_station_meta(const std::filesystem::path& path) {
  return parse_meta_lines(read_lines(path), path.string());
}

std::vector<StationMeta> parse_station_meta_text(const std::string& text,
                                                 const std::string& source) {
  return parse_meta_lines(split_text_lines(text), source);
}

}  // namespace runclust
