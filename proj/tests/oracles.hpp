#pragma once

// Reference implementations used only by tests. They follow the textbook
// definitions as literally as possible and share no code with the library.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Run {
  std::size_t start;
  int length;
  bool operator==(const Run&) const = default;
};

/// Marks every above-threshold sample, then reports each index that starts
/// a block together with the block's length.
inline std::vector<Run> naive_runs(const std::vector<double>& values,
                                   const std::vector<bool>& missing,
                                   double threshold) {
  std::vector<bool> above(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    above[i] = !missing[i] && values[i] > threshold;
  }
  std::vector<Run> runs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!above[i]) continue;
    if (i > 0 && above[i - 1]) continue;
    int len = 0;
    for (std::size_t j = i; j < values.size() && above[j]; ++j) ++len;
    runs.push_back({i, len});
  }
  return runs;
}

/// Window membership by explicit interval test: k*tau <= x < (k+1)*tau,
/// and a window counts only if it ends inside the span.
inline std::vector<long long> brute_counts(const std::vector<double>& offsets,
                                           double span, double tau) {
  std::vector<long long> counts;
  for (long long k = 0; static_cast<double>(k + 1) * tau <= span; ++k) {
    const double lo = static_cast<double>(k) * tau;
    const double hi = static_cast<double>(k + 1) * tau;
    long long c = 0;
    for (double x : offsets) c += (x >= lo && x < hi);
    counts.push_back(c);
  }
  return counts;
}

inline long double brute_af(const std::vector<long long>& counts) {
  long double sq = 0, total = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    total += counts[k];
    if (k + 1 < counts.size()) {
      const long double d = counts[k + 1] - counts[k];
      sq += d * d;
    }
  }
  const long double mean_sq = sq / static_cast<long double>(counts.size() - 1);
  const long double mean = total / static_cast<long double>(counts.size());
  return mean_sq / (2 * mean);
}

inline long double cv(const std::vector<double>& t) {
  long double m = 0;
  for (double x : t) m += x;
  m /= t.size();
  long double v = 0;
  for (double x : t) v += (x - m) * (x - m);
  v /= t.size();
  return std::sqrt(v) / m;
}

inline long double lv(const std::vector<double>& t) {
  long double acc = 0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const long double d = static_cast<long double>(t[i]) - t[i + 1];
    const long double s = static_cast<long double>(t[i]) + t[i + 1];
    acc += 3 * d * d / (s * s);
  }
  return acc / (t.size() - 1);
}

/// One-based rank interpolation written out for a sorted vector.
inline double rank_quantile(const std::vector<double>& sorted, double p) {
  const double rank = p * (static_cast<double>(sorted.size()) - 1.0) + 1.0;
  const auto below = static_cast<std::size_t>(std::floor(rank));
  if (below >= sorted.size()) return sorted.back();
  return sorted[below - 1] + (rank - static_cast<double>(below)) *
                                 (sorted[below] - sorted[below - 1]);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Relative path -> content for every regular file under `root`.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[std::filesystem::relative(e.path(), root).string()] = read_file(e.path());
    }
  }
  return out;
}

}  // namespace oracle
