#include "runclust/stats.hpp"

#include <cmath>

#include "runclust/error.hpp"
#include "runclust/io.hpp"

namespace runclust {

IntereventSeries interevent_times(const MarkedPointProcess& pp) {
  if (pp.events.size() < 2) {
    throw InsufficientData("interevent times need at least 2 events, have " +
                           std::to_string(pp.events.size()));
  }
  IntereventSeries out;
  out.intervals.reserve(pp.events.size() - 1);
  for (std::size_t i = 1; i < pp.events.size(); ++i) {
    const double gap = pp.events[i].time - pp.events[i - 1].time;
    if (!(gap > 0.0)) {
      throw DataError("event times are not strictly increasing at index " +
                      std::to_string(i));
    }
    out.intervals.push_back(gap);
  }
  return out;
}

RunLengthDensity run_length_density(const MarkedPointProcess& pp) {
  if (pp.events.empty()) {
    throw InsufficientData("run-length density of an empty process");
  }
  std::map<int, std::size_t> counts;
  for (const auto& e : pp.events) ++counts[e.length];
  RunLengthDensity out;
  const auto n = static_cast<double>(pp.events.size());
  for (const auto& [m, c] : counts) out.p[m] = static_cast<double>(c) / n;
  return out;
}

RunLengthDensity average_density(std::span<const RunLengthDensity> densities) {
  if (densities.empty()) {
    throw InsufficientData("average of an empty list of densities");
  }
  std::map<int, double> sums;
  for (const auto& d : densities) {
    for (const auto& [m, prob] : d.p) sums[m] += prob;
  }
  RunLengthDensity out;
  const auto k = static_cast<double>(densities.size());
  for (const auto& [m, s] : sums) out.p[m] = s / k;
  return out;
}

double coefficient_of_variation(std::span<const double> intervals) {
  if (intervals.size() < 2) {
    throw InsufficientData("Cv needs at least 2 interevent times");
  }
  const auto n = static_cast<double>(intervals.size());
  double sum = 0.0;
  for (double t : intervals) sum += t;
  const double mean = sum / n;
  double ss = 0.0;
  for (double t : intervals) ss += (t - mean) * (t - mean);
  return std::sqrt(ss / n) / mean;
}

double local_coefficient_of_variation(std::span<const double> intervals) {
  if (intervals.size() < 2) {
    throw InsufficientData("Lv needs at least 2 interevent times");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
    const double d = intervals[i] - intervals[i + 1];
    const double s = intervals[i] + intervals[i + 1];
    acc += 3.0 * (d * d) / (s * s);
  }
  return acc / static_cast<double>(intervals.size() - 1);
}

double mean_interevent_time(std::span<const double> intervals) {
  if (intervals.empty()) {
    throw InsufficientData("mean of an empty interevent series");
  }
  double sum = 0.0;
  for (double t : intervals) sum += t;
  return sum / static_cast<double>(intervals.size());
}

std::string density_to_csv(const RunLengthDensity& density) {
  std::string out = "m,probability\n";
  for (const auto& [m, prob] : density.p) {
    out += std::to_string(m);
    out += ',';
    out += format_number(prob);
    out += '\n';
  }
  return out;
}

}  // namespace runclust
