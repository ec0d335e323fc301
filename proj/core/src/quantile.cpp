#include "runclust/quantile.hpp"

#include <algorithm>
#include <cmath>

#include "runclust/error.hpp"

namespace runclust {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InsufficientData("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("quantile probability must lie in [0,1]");
  }
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

}  // namespace runclust
