#pragma once

#include <span>
#include <vector>

namespace runclust {

/// Empirical quantile of already sorted data by linear interpolation between
/// adjacent order statistics at one-based rank p*(n-1)+1.
double quantile_sorted(std::span<const double> sorted, double p);

/// Sorts a copy of `values` and evaluates quantile_sorted.
double quantile(std::vector<double> values, double p);

}  // namespace runclust
