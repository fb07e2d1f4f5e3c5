#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "cfh/error.hpp"
#include "cfh/labeling/series.hpp"

namespace cfh::labeling {

enum class TrendLabel { Escalate, DeEscalate, Peace, StableConflict };

inline constexpr std::array<TrendLabel, 4> kAllLabels = {TrendLabel::Escalate, TrendLabel::DeEscalate,
                                                         TrendLabel::Peace, TrendLabel::StableConflict};

/// Display form used in prompts and reports.
constexpr std::string_view display_name(TrendLabel l) {
  switch (l) {
    case TrendLabel::Escalate: return "Escalate";
    case TrendLabel::DeEscalate: return "De-escalate";
    case TrendLabel::Peace: return "Peace/No Conflict";
    case TrendLabel::StableConflict: return "Stable Conflict";
  }
  return "";
}

/// Stable identifier used in JSON files.
constexpr std::string_view key_name(TrendLabel l) {
  switch (l) {
    case TrendLabel::Escalate: return "Escalate";
    case TrendLabel::DeEscalate: return "DeEscalate";
    case TrendLabel::Peace: return "Peace";
    case TrendLabel::StableConflict: return "StableConflict";
  }
  return "";
}

inline TrendLabel label_from_key(std::string_view key) {
  for (auto l : kAllLabels)
    if (key_name(l) == key) return l;
  throw Error(ErrorKind::InvalidArgument, "unknown trend label '" + std::string(key) + "'");
}

inline std::size_t label_index(TrendLabel l) { return static_cast<std::size_t>(l); }

struct LabelingConfig {
  int window_months = 3;
  /// Fixed slope threshold (fatalities/month). Unset means
  /// max(slope_floor, slope_relative * window mean).
  std::optional<double> slope_threshold;
  double slope_relative = 0.10;
  double slope_floor = 10.0;
  std::int64_t peace_level = 25;
  double ratio_threshold = 0.25;

  void validate() const {
    if (window_months < 2) throw Error(ErrorKind::Config, "labeling.window_months must be >= 2");
    if (slope_threshold && !(*slope_threshold > 0))
      throw Error(ErrorKind::Config, "labeling.slope_threshold must be > 0");
    if (!(slope_relative > 0) || !(slope_floor > 0))
      throw Error(ErrorKind::Config, "labeling.slope_relative and slope_floor must be > 0");
    if (peace_level < 0) throw Error(ErrorKind::Config, "labeling.peace_level must be >= 0");
    if (!(ratio_threshold > 0)) throw Error(ErrorKind::Config, "labeling.ratio_threshold must be > 0");
  }
};

/// Ordinary-least-squares slope of `values` against their index, in units per
/// bucket. Computed as an exact integer ratio so that reversing the window
/// negates the result bit-for-bit.
inline double ols_slope(std::span<const std::int64_t> values) {
  const auto n = static_cast<std::int64_t>(values.size());
  if (n < 2) throw Error(ErrorKind::WindowTooShort, "slope needs at least 2 buckets");
  std::int64_t sum_x = 0, sum_y = 0, sum_xy = 0, sum_xx = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    sum_x += i;
    sum_y += values[static_cast<std::size_t>(i)];
    sum_xy += i * values[static_cast<std::size_t>(i)];
    sum_xx += i * i;
  }
  const std::int64_t numerator = n * sum_xy - sum_x * sum_y;
  const std::int64_t denominator = n * sum_xx - sum_x * sum_x;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

inline double window_mean(std::span<const std::int64_t> values) {
  if (values.empty()) return 0.0;
  std::int64_t s = 0;
  for (auto v : values) s += v;
  return static_cast<double>(s) / static_cast<double>(values.size());
}

inline double effective_slope_threshold(std::span<const std::int64_t> values, const LabelingConfig& config) {
  if (config.slope_threshold) return *config.slope_threshold;
  return std::max(config.slope_floor, config.slope_relative * window_mean(values));
}

/// Ground-truth trend over a window of monthly sums (oldest first).
inline TrendLabel trend_label(std::span<const std::int64_t> window, const LabelingConfig& config = {}) {
  if (window.size() < 2) throw Error(ErrorKind::WindowTooShort, "trend window needs at least 2 buckets");
  const double slope = ols_slope(window);
  const double threshold = effective_slope_threshold(window, config);
  const bool all_quiet =
      std::all_of(window.begin(), window.end(), [&](std::int64_t v) { return v < config.peace_level; });
  if (all_quiet && slope >= -threshold && slope <= threshold) return TrendLabel::Peace;
  if (slope > threshold) return TrendLabel::Escalate;
  if (slope < -threshold) return TrendLabel::DeEscalate;
  return TrendLabel::StableConflict;
}

inline TrendLabel trend_label(const FatalitySeries& window, const LabelingConfig& config = {}) {
  const auto sums = window.sums();
  return trend_label(std::span<const std::int64_t>(sums), config);
}

/// Maps a predicted monthly fatality count to a trend class relative to the
/// trailing monthly sums. A prediction equal to the trailing mean is never a
/// change, which keeps the zero-history case (mean 0, prediction 0) stable.
inline TrendLabel fatalities_to_label(double predicted, std::span<const std::int64_t> trailing,
                                      const LabelingConfig& config = {}) {
  if (trailing.size() < static_cast<std::size_t>(std::max(1, config.window_months)))
    throw Error(ErrorKind::WindowTooShort, "trailing series shorter than window_months");
  if (predicted < 0) throw Error(ErrorKind::InvalidArgument, "predicted fatalities must be >= 0");
  const double m = window_mean(trailing);
  const auto peace = static_cast<double>(config.peace_level);
  if (predicted < peace && m < peace) return TrendLabel::Peace;
  if (predicted > m && predicted >= m * (1.0 + config.ratio_threshold)) return TrendLabel::Escalate;
  if (predicted < m && predicted <= m * (1.0 - config.ratio_threshold)) return TrendLabel::DeEscalate;
  return TrendLabel::StableConflict;
}

inline TrendLabel fatalities_to_label(double predicted, const FatalitySeries& trailing,
                                      const LabelingConfig& config = {}) {
  const auto sums = trailing.sums();
  return fatalities_to_label(predicted, std::span<const std::int64_t>(sums), config);
}

}  // namespace cfh::labeling
