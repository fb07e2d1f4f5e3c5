#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfh/error.hpp"

namespace cfh::labeling {

/// Cut points for fatality-range bins. Bin i covers [edges[i-1], edges[i]).
struct QuantileBins {
  std::vector<double> edges;
  int requested_k = 4;

  std::size_t bin_count() const { return edges.size() + 1; }
  /// Bins lost to duplicate or degenerate edges.
  std::size_t collapsed() const {
    const auto k = static_cast<std::size_t>(requested_k);
    return k > bin_count() ? k - bin_count() : 0;
  }
};

/// Linear-interpolation empirical quantile of sorted data at probability p.
inline double linear_quantile(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Fits i/k quantile edges (i = 1..k-1) on historical values. Equal edges are
/// merged, and edges at or below the minimum are dropped since no historical
/// value could fall below them; both shrink the effective bin count.
inline QuantileBins compute_quantile_bins(std::vector<double> values, int k = 4) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "quantile bins need at least one value");
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "quantile bins need k >= 2");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite value in bin history");
  std::sort(values.begin(), values.end());
  QuantileBins bins;
  bins.requested_k = k;
  const double min_value = values.front();
  for (int i = 1; i < k; ++i) {
    const double edge = linear_quantile(values, static_cast<double>(i) / static_cast<double>(k));
    if (edge <= min_value) continue;
    if (!bins.edges.empty() && edge <= bins.edges.back()) continue;
    bins.edges.push_back(edge);
  }
  return bins;
}

/// Left-closed binning: a value equal to an edge lands in the higher bin.
inline std::size_t assign_bin(double value, const QuantileBins& bins) {
  return static_cast<std::size_t>(std::upper_bound(bins.edges.begin(), bins.edges.end(), value) -
                                  bins.edges.begin());
}

inline nlohmann::json to_json(const QuantileBins& b) { return {{"edges", b.edges}, {"k", b.requested_k}}; }

inline QuantileBins bins_from_json(const nlohmann::json& j) {
  QuantileBins b;
  b.edges = j.at("edges").get<std::vector<double>>();
  b.requested_k = j.at("k").get<int>();
  for (std::size_t i = 1; i < b.edges.size(); ++i)
    if (!(b.edges[i - 1] < b.edges[i])) throw Error(ErrorKind::InvalidArgument, "bin edges must ascend strictly");
  return b;
}

}  // namespace cfh::labeling
