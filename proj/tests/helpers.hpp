#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "runclust/runs.hpp"
#include "runclust/series.hpp"

namespace testing {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// NaN entries become missing samples.
inline runclust::SampledSeries make_series(const std::vector<double>& v,
                                           std::int64_t t0 = 0,
                                           std::int64_t dt = 600,
                                           const std::string& id = "S") {
  std::vector<bool> missing(v.size());
  std::vector<double> values(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    missing[i] = std::isnan(v[i]);
    values[i] = missing[i] ? 0.0 : v[i];
  }
  return runclust::SampledSeries(id, t0, dt, values, missing);
}

inline runclust::MarkedPointProcess make_process(
    const std::vector<double>& times, double start, double end,
    double dt = 1.0, std::vector<int> lengths = {}) {
  runclust::MarkedPointProcess pp;
  pp.window_start = start;
  pp.window_end = end;
  pp.dt = dt;
  pp.station_id = "S";
  for (std::size_t i = 0; i < times.size(); ++i) {
    pp.events.push_back({times[i], lengths.empty() ? 1 : lengths[i]});
  }
  return pp;
}

/// Fresh empty directory under the test's scratch root.
inline std::filesystem::path scratch(const std::string& name) {
  const std::filesystem::path p = std::filesystem::path(RUNCLUST_TEST_TMP) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
