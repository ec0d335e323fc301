#pragma once

#include <map>
#include <span>
#include <vector>

#include "runclust/runs.hpp"

namespace runclust {

/// Interevent durations T_i = t_{i+1} - t_i (seconds), all positive.
struct IntereventSeries {
  std::vector<double> intervals;

  std::size_t size() const { return intervals.size(); }
};

/// Sparse probability mass function of run lengths.
struct RunLengthDensity {
  std::map<int, double> p;

  int support_max() const { return p.empty() ? 0 : p.rbegin()->first; }
  double at(int m) const {
    const auto it = p.find(m);
    return it == p.end() ? 0.0 : it->second;
  }
};

IntereventSeries interevent_times(const MarkedPointProcess& pp);

RunLengthDensity run_length_density(const MarkedPointProcess& pp);

/// Pointwise mean over densities; absent lengths count as zero.
RunLengthDensity average_density(std::span<const RunLengthDensity> densities);

/// Global coefficient of variation sigma/mean, population sigma (divide by n).
double coefficient_of_variation(std::span<const double> intervals);
inline double coefficient_of_variation(const IntereventSeries& t) {
  return coefficient_of_variation(t.intervals);
}

/// Local coefficient of variation over the n-1 adjacent interval pairs.
double local_coefficient_of_variation(std::span<const double> intervals);
inline double local_coefficient_of_variation(const IntereventSeries& t) {
  return local_coefficient_of_variation(t.intervals);
}

double mean_interevent_time(std::span<const double> intervals);
inline double mean_interevent_time(const IntereventSeries& t) {
  return mean_interevent_time(t.intervals);
}

/// Writes `m,probability` rows.
std::string density_to_csv(const RunLengthDensity& density);

}  // namespace runclust
