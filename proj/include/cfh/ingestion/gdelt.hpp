#pragma once

#include <charconv>
#include <istream>
#include <iterator>
#include <map>
#include <string>
#include <string_view>

#include "cfh/ingestion/records.hpp"
#include "cfh/text.hpp"

namespace cfh::ingestion {

using ColumnMap = std::map<std::string, std::size_t>;

inline const std::vector<std::string>& required_gdelt_columns() {
  static const std::vector<std::string> kRequired = {"SQLDATE",        "Actor1CountryCode", "Actor2CountryCode",
                                                     "GoldsteinScale", "AvgTone",           "SOURCEURL"};
  return kRequired;
}

/// Column positions in the 61-column GDELT 2.0 event export.
inline ColumnMap gdelt2_default_columns() {
  return {{"SQLDATE", 1},      {"Actor1CountryCode", 7}, {"Actor2CountryCode", 17},
          {"GoldsteinScale", 30}, {"AvgTone", 34},        {"SOURCEURL", 60}};
}

/// Column positions in the 58-column GDELT 1.0 daily export.
inline ColumnMap gdelt1_default_columns() {
  return {{"SQLDATE", 1},      {"Actor1CountryCode", 7}, {"Actor2CountryCode", 17},
          {"GoldsteinScale", 30}, {"AvgTone", 34},        {"SOURCEURL", 57}};
}

namespace detail {

inline std::optional<double> parse_double(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline bool is_country_code(std::string_view s) {
  if (s.size() != 3) return false;
  for (char c : s)
    if (c < 'A' || c > 'Z') return false;
  return true;
}

inline bool is_absolute_url(std::string_view s) {
  return text::starts_with_icase(s, "http://") || text::starts_with_icase(s, "https://");
}

}  // namespace detail

/// Parses a headerless, tab-separated GDELT event export. Blank lines are not
/// data rows; every other line ends up either in `records` or in `rejects`.
inline ParseResult<GdeltEvent> parse_gdelt_export(std::string_view content,
                                                  const ColumnMap& columns = gdelt2_default_columns()) {
  for (const auto& name : required_gdelt_columns()) {
    if (!columns.contains(name)) throw Error(ErrorKind::ColumnMapIncomplete, "no index for column " + name);
  }
  const std::size_t c_date = columns.at("SQLDATE");
  const std::size_t c_a1 = columns.at("Actor1CountryCode");
  const std::size_t c_a2 = columns.at("Actor2CountryCode");
  const std::size_t c_gold = columns.at("GoldsteinScale");
  const std::size_t c_tone = columns.at("AvgTone");
  const std::size_t c_url = columns.at("SOURCEURL");
  std::size_t max_col = 0;
  for (const auto& [_, idx] : columns) max_col = std::max(max_col, idx);

  ParseResult<GdeltEvent> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    auto line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;

    const auto fields = text::split(line, '\t');
    if (fields.size() <= max_col) {
      out.rejects.add(line_no, "expected at least " + std::to_string(max_col + 1) + " columns, got " +
                                   std::to_string(fields.size()));
      continue;
    }
    auto date = try_parse_date(text::trim(fields[c_date]));
    if (!date) {
      out.rejects.add(line_no, "invalid SQLDATE");
      continue;
    }
    auto gold = detail::parse_double(fields[c_gold]);
    auto tone = detail::parse_double(fields[c_tone]);
    if (!gold || !tone) {
      out.rejects.add(line_no, "non-numeric GoldsteinScale or AvgTone");
      continue;
    }
    if (*gold < kGoldsteinMin || *gold > kGoldsteinMax) {
      out.rejects.add(line_no, "GoldsteinScale out of range");
      continue;
    }
    if (*tone < kToneMin || *tone > kToneMax) {
      out.rejects.add(line_no, "AvgTone out of range");
      continue;
    }
    GdeltEvent ev;
    ev.event_date = *date;
    ev.goldstein = *gold;
    ev.avg_tone = *tone;
    bool bad_actor = false;
    for (auto [idx, slot] : {std::pair{c_a1, &ev.actor1_country}, std::pair{c_a2, &ev.actor2_country}}) {
      auto code = text::trim(fields[idx]);
      if (code.empty()) continue;
      if (!detail::is_country_code(code)) {
        bad_actor = true;
        break;
      }
      *slot = std::string(code);
    }
    if (bad_actor) {
      out.rejects.add(line_no, "malformed actor country code");
      continue;
    }
    auto url = text::trim(fields[c_url]);
    if (detail::is_absolute_url(url)) ev.source_url = std::string(url);
    out.records.push_back(std::move(ev));
  }
  return out;
}

inline ParseResult<GdeltEvent> parse_gdelt_export(std::istream& in,
                                                  const ColumnMap& columns = gdelt2_default_columns()) {
  if (!in) throw Error(ErrorKind::UnreadableStream, "gdelt stream is not readable");
  std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw Error(ErrorKind::UnreadableStream, "read error on gdelt stream");
  return parse_gdelt_export(std::string_view(content), columns);
}

}  // namespace cfh::ingestion
