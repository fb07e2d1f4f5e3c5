#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfh/evaluation/metrics.hpp"
#include "cfh/labeling/quantile.hpp"

namespace cfh::evaluation {

enum class PredictionType { CategoricalClass, ClassFromFatalities, BinnedRegression };

/// A block is nullopt when no record was scorable for it, which is distinct
/// from a computed value of zero.
struct MetricsReport {
  std::optional<BlockMetrics> categorical;
  std::optional<BlockMetrics> from_fatalities;
  std::optional<BlockMetrics> binned;
  std::optional<double> mae;
  std::size_t n_input = 0;
  std::size_t n_scored = 0;
  std::size_t n_failed = 0;
  std::size_t n_empty_context = 0;

  double parse_failure_rate() const {
    return n_input == 0 ? 0.0 : static_cast<double>(n_failed) / static_cast<double>(n_input);
  }

  const std::optional<BlockMetrics>& block(PredictionType t) const {
    switch (t) {
      case PredictionType::CategoricalClass: return categorical;
      case PredictionType::ClassFromFatalities: return from_fatalities;
      case PredictionType::BinnedRegression: return binned;
    }
    return categorical;
  }
};

/// Trailing monthly sums (oldest first) before a record's target month, or
/// nullopt if unknown.
using TrailingLookup = std::function<std::optional<std::vector<std::int64_t>>(const PredictionRecord&)>;

namespace detail {

template <typename F>
std::optional<BlockMetrics> try_block(F&& build) {
  try {
    return block_metrics(build());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoScorableRecords) return std::nullopt;
    throw;
  }
}

}  // namespace detail

/// `bins` is keyed by country; records of a country without bins are left out
/// of the binned block.
inline MetricsReport evaluate_all(const std::vector<PredictionRecord>& records,
                                  const std::map<std::string, labeling::QuantileBins>& bins,
                                  const labeling::LabelingConfig& labeling_config, const TrailingLookup& trailing) {
  MetricsReport rep;
  rep.n_input = records.size();
  for (const auto& r : records) {
    if (r.scorable()) ++rep.n_scored;
    else ++rep.n_failed;
    if (r.empty_context) ++rep.n_empty_context;
  }

  rep.categorical = detail::try_block([&] { return confusion(records, categorical_pair); });

  rep.from_fatalities = detail::try_block([&] {
    return confusion(records, [&](const PredictionRecord& r) -> std::optional<std::pair<std::size_t, std::size_t>> {
      auto window = trailing(r);
      if (!window || window->size() < static_cast<std::size_t>(labeling_config.window_months)) return std::nullopt;
      const auto predicted = labeling::fatalities_to_label(r.predicted->fatalities_point, *window, labeling_config);
      return std::pair{labeling::label_index(r.truth_label), labeling::label_index(predicted)};
    });
  });

  std::size_t n_bins = 0;
  for (const auto& r : records) {
    if (auto it = bins.find(r.task.country.name); it != bins.end()) n_bins = std::max(n_bins, it->second.bin_count());
  }
  rep.binned = detail::try_block([&] {
    return confusion(
        records,
        [&](const PredictionRecord& r) -> std::optional<std::pair<std::size_t, std::size_t>> {
          auto it = bins.find(r.task.country.name);
          if (it == bins.end()) return std::nullopt;
          return std::pair{labeling::assign_bin(static_cast<double>(r.truth_fatalities), it->second),
                           labeling::assign_bin(r.predicted->fatalities_point, it->second)};
        },
        bin_class_names(std::max<std::size_t>(n_bins, 1)));
  });

  if (rep.n_scored > 0) rep.mae = mae(records);
  return rep;
}

}  // namespace cfh::evaluation
