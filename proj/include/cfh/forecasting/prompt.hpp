#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "cfh/forecasting/rag_context.hpp"
#include "cfh/forecasting/task.hpp"
#include "cfh/labeling/trend.hpp"

namespace cfh::forecasting {

inline constexpr std::string_view kLabelSet = "Escalate, De-escalate, Peace/No Conflict, Stable Conflict";

inline constexpr std::string_view kReplyFormat =
    "Answer in exactly this format, with no other text:\n"
    "TREND: <one of: Escalate, De-escalate, Peace/No Conflict, Stable Conflict>\n"
    "FATALITIES: <a number, or a range written as low-high>";

inline constexpr std::string_view kSystemPrompt =
    "You are a conflict forecasting analyst. You give concise, calibrated forecasts.";

inline constexpr std::string_view kDefaultParametricTemplate =
    "Forecast the armed conflict situation in {country} for {target_month}.\n"
    "Rely only on your own knowledge of events before {target_month}.\n"
    "\n"
    "1. Classify the expected conflict trend for the month using exactly one of these labels: {label_set}.\n"
    "2. Estimate the number of conflict-related fatalities in {country} during {target_month}, "
    "as a specific count or a numerical range.\n"
    "\n"
    "{reply_format}\n";

inline constexpr std::string_view kDefaultRagTemplate =
    "Forecast the armed conflict situation in {country} for {target_month}.\n"
    "Below is context covering the three months before {target_month}.\n"
    "\n"
    "Summary of the most relevant news excerpts:\n"
    "{summary}\n"
    "\n"
    "Average tone of retrieved articles (GDELT): {avg_tone}\n"
    "Average Goldstein Scale score (GDELT): {avg_goldstein}\n"
    "Weekly fatality counts over the past 12 weeks, oldest first (ACLED): {weekly_fatalities}\n"
    "\n"
    "1. Classify the expected conflict trend for the month using exactly one of these labels: {label_set}.\n"
    "2. Estimate the number of conflict-related fatalities in {country} during {target_month}, "
    "as a specific count or a numerical range.\n"
    "\n"
    "{reply_format}\n";

/// Fixed two-decimal rendering; never prints "-0.00".
inline std::string format_fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

namespace detail {

/// Single-pass substitution of `{name}` placeholders; substituted text is not
/// rescanned, unknown names are left untouched.
inline std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

inline void require_placeholders(std::string_view tmpl, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (tmpl.find("{" + n + "}") == std::string_view::npos)
      throw Error(ErrorKind::TemplateMissingPlaceholder, "template lacks {" + n + "}");
  }
}

inline std::map<std::string, std::string> base_values(const ForecastTask& task) {
  return {{"country", task.country.name},
          {"target_month", month_long_name(task.target_month)},
          {"label_set", std::string(kLabelSet)},
          {"reply_format", std::string(kReplyFormat)}};
}

inline std::string finish(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  auto out = substitute(tmpl, values);
  // The reply format is mandatory even when a template forgets to place it.
  if (tmpl.find("{reply_format}") == std::string_view::npos) {
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
    out += "\n";
    out += kReplyFormat;
    out += "\n";
  }
  return out;
}

}  // namespace detail

inline std::string render_prompt_parametric(const ForecastTask& task,
                                            std::string_view tmpl = kDefaultParametricTemplate) {
  detail::require_placeholders(tmpl, {"country", "target_month", "label_set"});
  return detail::finish(tmpl, detail::base_values(task));
}

inline std::string weekly_list(const std::array<std::int64_t, kWeeklyWindow>& weekly) {
  std::string out;
  for (std::size_t i = 0; i < weekly.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(weekly[i]);
  }
  return out;
}

inline std::string render_prompt_rag(const ForecastTask& task, const RagContext& context,
                                     std::string_view tmpl = kDefaultRagTemplate) {
  detail::require_placeholders(
      tmpl, {"country", "target_month", "label_set", "summary", "avg_tone", "avg_goldstein", "weekly_fatalities"});
  auto values = detail::base_values(task);
  values["summary"] = context.summary.text.empty() ? "(no relevant news excerpts were found)" : context.summary.text;
  values["avg_tone"] = format_fixed2(context.avg_tone);
  values["avg_goldstein"] = format_fixed2(context.avg_goldstein);
  values["weekly_fatalities"] = weekly_list(context.weekly_fatalities);
  return detail::finish(tmpl, values);
}

}  // namespace cfh::forecasting
