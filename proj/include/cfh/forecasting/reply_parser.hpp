#pragma once

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfh/labeling/trend.hpp"
#include "cfh/text.hpp"

namespace cfh::forecasting {

using labeling::TrendLabel;

struct ForecastOutput {
  TrendLabel label = TrendLabel::StableConflict;
  double fatalities_point = 0.0;
  std::optional<std::pair<double, double>> fatalities_range;
  std::string raw_text;

  bool operator==(const ForecastOutput&) const = default;
};

namespace detail {

struct LabelHit {
  std::size_t pos;
  TrendLabel label;
};

inline bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

/// Label keywords in order of appearance. At each position the longest
/// surface form wins and its text is consumed, so "de-escalate" never also
/// yields "escalate".
inline std::vector<LabelHit> scan_labels(std::string_view s) {
  struct Form {
    std::string_view text;
    TrendLabel label;
  };
  static constexpr std::array<Form, 10> kForms = {{{"de-escalat", TrendLabel::DeEscalate},
                                                   {"de escalat", TrendLabel::DeEscalate},
                                                   {"deescalat", TrendLabel::DeEscalate},
                                                   {"de\xE2\x80\x93" "escalat", TrendLabel::DeEscalate},
                                                   {"escalat", TrendLabel::Escalate},
                                                   {"no conflict", TrendLabel::Peace},
                                                   {"no-conflict", TrendLabel::Peace},
                                                   {"no armed conflict", TrendLabel::Peace},
                                                   {"peace", TrendLabel::Peace},
                                                   {"stable", TrendLabel::StableConflict}}};
  const std::string lower = text::to_lower(s);
  std::vector<LabelHit> hits;
  std::size_t i = 0;
  while (i < lower.size()) {
    if (i > 0 && is_alpha(lower[i - 1])) {
      ++i;
      continue;
    }
    bool matched = false;
    for (const auto& f : kForms) {
      if (lower.compare(i, f.text.size(), f.text) == 0) {
        hits.push_back({i, f.label});
        i += f.text.size();
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return hits;
}

struct NumberSpan {
  std::size_t begin;
  std::size_t end;
  double value;
};

/// Number at `i`: digits with optional thousands commas and a decimal part.
inline std::optional<NumberSpan> number_at(std::string_view s, std::size_t i) {
  if (i >= s.size() || !is_digit(s[i])) return std::nullopt;
  if (i > 0 && (is_alpha(s[i - 1]) || is_digit(s[i - 1]) || s[i - 1] == '.')) return std::nullopt;
  std::string digits;
  std::size_t j = i;
  std::size_t group = 0;
  while (j < s.size()) {
    if (is_digit(s[j])) {
      digits.push_back(s[j]);
      ++group;
      ++j;
    } else if (s[j] == ',' && group <= 3 && j + 3 < s.size() && is_digit(s[j + 1]) && is_digit(s[j + 2]) &&
               is_digit(s[j + 3]) && (j + 4 >= s.size() || !is_digit(s[j + 4]))) {
      group = 0;
      ++j;  // thousands separator
    } else {
      break;
    }
  }
  if (j + 1 < s.size() && s[j] == '.' && is_digit(s[j + 1])) {
    digits.push_back('.');
    ++j;
    while (j < s.size() && is_digit(s[j])) digits.push_back(s[j++]);
  }
  return NumberSpan{i, j, std::stod(digits)};
}

struct Quantity {
  double low;
  double high;
  bool is_range;
};

/// First number or "a-b" / "a to b" range in `s`.
inline std::optional<Quantity> first_quantity(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto first = number_at(s, i);
    if (!first) continue;
    std::size_t j = first->end;
    while (j < s.size() && s[j] == ' ') ++j;
    std::size_t sep_len = 0;
    if (j < s.size() && s[j] == '-') sep_len = 1;
    else if (s.compare(j, 3, "\xE2\x80\x93") == 0 || s.compare(j, 3, "\xE2\x80\x94") == 0) sep_len = 3;
    else if (text::starts_with_icase(s.substr(j), "to ") || text::starts_with_icase(s.substr(j), "to\t")) sep_len = 2;
    if (sep_len) {
      std::size_t k = j + sep_len;
      while (k < s.size() && s[k] == ' ') ++k;
      if (auto second = number_at(s, k); second && second->value >= first->value)
        return Quantity{first->value, second->value, true};
    }
    return Quantity{first->value, first->value, false};
  }
  return std::nullopt;
}

/// Text following each occurrence of `marker` (case-insensitive) up to end of line.
inline std::vector<std::string_view> marker_lines(std::string_view s, std::string_view marker) {
  std::vector<std::string_view> out;
  const std::string lower = text::to_lower(s);
  const std::string m = text::to_lower(marker);
  std::size_t pos = 0;
  while ((pos = lower.find(m, pos)) != std::string::npos) {
    const std::size_t start = pos + m.size();
    auto nl = s.find('\n', start);
    if (nl == std::string_view::npos) nl = s.size();
    out.push_back(s.substr(start, nl - start));
    pos = start;
  }
  return out;
}

}  // namespace detail

/// Parses a model reply. Preferred grammar is "TREND: <label>" and
/// "FATALITIES: <n | a-b | a to b>"; without usable markers the first label
/// keyword and first number anywhere in the text are taken.
inline ForecastOutput parse_forecast(std::string_view reply) {
  ForecastOutput out;
  out.raw_text = std::string(reply);

  std::optional<TrendLabel> label;
  for (auto line : detail::marker_lines(reply, "TREND:")) {
    auto hits = detail::scan_labels(line);
    if (hits.empty()) continue;
    if (label && *label != hits.front().label)
      throw Error(ErrorKind::AmbiguousLabel, "conflicting TREND: markers in reply");
    label = hits.front().label;
  }
  if (!label) {
    auto hits = detail::scan_labels(reply);
    if (hits.empty()) throw Error(ErrorKind::MissingLabel, "no trend label in reply");
    label = hits.front().label;
  }
  out.label = *label;

  std::optional<detail::Quantity> qty;
  for (auto line : detail::marker_lines(reply, "FATALITIES:")) {
    if ((qty = detail::first_quantity(line))) break;
  }
  if (!qty) qty = detail::first_quantity(reply);
  if (!qty) throw Error(ErrorKind::MissingFatalities, "no fatality estimate in reply");
  if (qty->is_range) {
    out.fatalities_range = std::pair{qty->low, qty->high};
    out.fatalities_point = (qty->low + qty->high) / 2.0;
  } else {
    out.fatalities_point = qty->low;
  }
  return out;
}

inline nlohmann::json to_json(const ForecastOutput& f) {
  nlohmann::json j = {{"label", labeling::key_name(f.label)},
                      {"fatalities_point", f.fatalities_point},
                      {"fatalities_range", nullptr},
                      {"raw_text", f.raw_text}};
  if (f.fatalities_range) j["fatalities_range"] = {f.fatalities_range->first, f.fatalities_range->second};
  return j;
}

inline ForecastOutput forecast_from_json(const nlohmann::json& j) {
  ForecastOutput f;
  f.label = labeling::label_from_key(j.at("label").get<std::string>());
  f.fatalities_point = j.at("fatalities_point").get<double>();
  if (j.contains("fatalities_range") && !j.at("fatalities_range").is_null())
    f.fatalities_range = std::pair{j.at("fatalities_range").at(0).get<double>(),
                                   j.at("fatalities_range").at(1).get<double>()};
  f.raw_text = j.value("raw_text", "");
  return f;
}

}  // namespace cfh::forecasting
