#include "runclust/runs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "runclust/error.hpp"
#include "runclust/io.hpp"
#include "runclust/quantile.hpp"
#include "runclust/timeutil.hpp"

namespace runclust {

std::vector<ThresholdSpec> compute_thresholds(
    const SampledSeries& series, const std::vector<double>& percentiles,
    std::size_t min_samples) {
  for (double p : percentiles) {
    if (!(p > 0.0 && p < 1.0)) {
      throw InvalidArgument("percentile must lie in (0,1), got " +
                            format_number(p));
    }
  }
  std::vector<double> values = series.present_values();
  if (values.size() < min_samples) {
    throw InsufficientData("series '" + series.station_id() + "' has " +
                           std::to_string(values.size()) +
                           " non-missing values; need at least " +
                           std::to_string(min_samples));
  }
  std::sort(values.begin(), values.end());
  std::vector<ThresholdSpec> out;
  out.reserve(percentiles.size());
  for (double p : percentiles) {
    out.push_back(ThresholdSpec{p, quantile_sorted(values, p)});
  }
  return out;
}

ThresholdSpec compute_threshold(const SampledSeries& series, double percentile,
                                std::size_t min_samples) {
  return compute_thresholds(series, {percentile}, min_samples).front();
}

MarkedPointProcess extract_runs(const SampledSeries& series,
                                const ThresholdSpec& threshold) {
  MarkedPointProcess pp;
  pp.window_start = static_cast<double>(series.t0());
  pp.window_end = static_cast<double>(series.time_at(series.size()));
  pp.dt = static_cast<double>(series.dt());
  pp.station_id = series.station_id();
  pp.threshold = threshold;
  pp.gap_fraction = series.gap_fraction();

  std::size_t run_start = 0;
  int run_length = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (!series.is_missing(k) && series.value(k) > threshold.value) {
      if (run_length == 0) run_start = k;
      ++run_length;
    } else if (run_length > 0) {
      pp.events.push_back(
          {static_cast<double>(series.time_at(run_start)), run_length});
      run_length = 0;
    }
  }
  if (run_length > 0) {
    pp.events.push_back(
        {static_cast<double>(series.time_at(run_start)), run_length});
  }
  return pp;
}

MarkedPointProcess filter_by_min_length(const MarkedPointProcess& pp,
                                        int min_length) {
  if (min_length < 1) throw InvalidArgument("L_m must be >= 1");
  MarkedPointProcess out = pp;
  std::erase_if(out.events, [min_length](const ExtremeEvent& e) {
    return e.length < min_length;
  });
  return out;
}

std::string events_to_csv(const MarkedPointProcess& pp) {
  std::string out = "event_time,run_length\n";
  for (const auto& e : pp.events) {
    out += format_iso8601(e.time);
    out += ',';
    out += std::to_string(e.length);
    out += '\n';
  }
  return out;
}

std::string events_sidecar_json(const MarkedPointProcess& pp) {
  nlohmann::ordered_json j;
  j["station_id"] = pp.station_id;
  j["window_start"] = format_iso8601(pp.window_start);
  j["window_end"] = format_iso8601(pp.window_end);
  j["window_start_epoch_s"] = pp.window_start;
  j["window_end_epoch_s"] = pp.window_end;
  j["dt_seconds"] = pp.dt;
  j["n_events"] = pp.events.size();
  if (pp.threshold) {
    j["threshold_value"] = pp.threshold->value;
    j["percentile"] = pp.threshold->percentile
                          ? nlohmann::ordered_json(*pp.threshold->percentile)
                          : nlohmann::ordered_json(nullptr);
  } else {
    j["threshold_value"] = nullptr;
    j["percentile"] = nullptr;
  }
  j["gap_fraction"] = pp.gap_fraction;
  j["quantile_estimator"] = "linear interpolation at rank p*(n-1)+1";
  j["run_comparison"] = "strictly greater than threshold";
  return j.dump(2) + "\n";
}

MarkedPointProcess events_from_csv(const std::string& csv_text,
                                   const std::string& sidecar_json) {
  MarkedPointProcess pp;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(sidecar_json);
    pp.station_id = j.value("station_id", std::string{});
    pp.window_start = j.at("window_start_epoch_s").get<double>();
    pp.window_end = j.at("window_end_epoch_s").get<double>();
    pp.dt = j.at("dt_seconds").get<double>();
    pp.gap_fraction = j.value("gap_fraction", 0.0);
    if (j.contains("threshold_value") && !j["threshold_value"].is_null()) {
      ThresholdSpec t;
      t.value = j["threshold_value"].get<double>();
      if (j.contains("percentile") && !j["percentile"].is_null()) {
        t.percentile = j["percentile"].get<double>();
      }
      pp.threshold = t;
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed event sidecar: ") + e.what());
  }
  if (!(pp.window_end > pp.window_start) || !(pp.dt > 0.0)) {
    throw DataError("event sidecar has an empty window or non-positive dt");
  }

  std::istringstream in(csv_text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      const auto header = split_csv_line(line);
      if (header.size() != 2 || header[0] != "event_time" ||
          header[1] != "run_length") {
        throw DataError("events:1: expected header 'event_time,run_length'");
      }
      continue;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    double len = 0.0;
    if (f.size() != 2 || !parse_double(f[1], len) || len < 1.0 ||
        len != std::floor(len)) {
      throw DataError("events:" + std::to_string(line_no) + ": malformed row");
    }
    double t = 0.0;
    if (!parse_double(f[0], t)) {
      try {
        t = parse_iso8601(f[0]);
      } catch (const DataError& e) {
        throw DataError("events:" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (!pp.events.empty() && !(t > pp.events.back().time)) {
      throw DataError("events:" + std::to_string(line_no) +
                      ": event times must be strictly increasing");
    }
    if (t < pp.window_start || t >= pp.window_end) {
      throw DataError("events:" + std::to_string(line_no) +
                      ": event outside the observation window");
    }
    pp.events.push_back({t, static_cast<int>(len)});
  }
  if (line_no == 0) throw DataError("events: empty file (no header)");
  return pp;
}

}  // namespace runclust
