#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfh/dates.hpp"
#include "cfh/error.hpp"

namespace cfh::ingestion {

using nlohmann::json;

struct GdeltEvent {
  Date event_date;
  std::optional<std::string> actor1_country;
  std::optional<std::string> actor2_country;
  double goldstein = 0.0;
  double avg_tone = 0.0;
  std::optional<std::string> source_url;

  bool operator==(const GdeltEvent&) const = default;
};

struct AcledEvent {
  Date event_date;
  std::string country;
  std::int64_t fatalities = 0;

  bool operator==(const AcledEvent&) const = default;
};

struct Article {
  std::string url;
  std::string fetched_at;  // ISO-8601 UTC, e.g. 2024-01-31T12:00:00Z
  std::string title;
  std::string body;
  std::vector<Date> origin_event_dates;

  bool operator==(const Article&) const = default;
};

/// Rows that failed to parse. Only the first `kMaxLines` line numbers are kept,
/// but `count` is always exact.
struct RejectReport {
  static constexpr std::size_t kMaxLines = 100;

  std::size_t count = 0;
  std::vector<std::size_t> lines;
  std::vector<std::string> reasons;

  void add(std::size_t line, std::string reason) {
    ++count;
    if (lines.size() < kMaxLines) {
      lines.push_back(line);
      reasons.push_back(std::move(reason));
    }
  }

  bool operator==(const RejectReport&) const = default;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  RejectReport rejects;
};

inline constexpr double kGoldsteinMin = -10.0;
inline constexpr double kGoldsteinMax = 10.0;
inline constexpr double kToneMin = -100.0;
inline constexpr double kToneMax = 100.0;

// --- normalized corpus (JSON lines) ---------------------------------------

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

inline json to_json(const GdeltEvent& e) {
  return json{{"event_date", format_date(e.event_date)},
              {"actor1_country", optional_to_json(e.actor1_country)},
              {"actor2_country", optional_to_json(e.actor2_country)},
              {"goldstein", e.goldstein},
              {"avg_tone", e.avg_tone},
              {"source_url", optional_to_json(e.source_url)}};
}

inline GdeltEvent gdelt_from_json(const json& j) {
  GdeltEvent e;
  e.event_date = parse_date(j.at("event_date").get<std::string>());
  e.actor1_country = optional_string(j, "actor1_country");
  e.actor2_country = optional_string(j, "actor2_country");
  e.goldstein = j.at("goldstein").get<double>();
  e.avg_tone = j.at("avg_tone").get<double>();
  e.source_url = optional_string(j, "source_url");
  if (e.goldstein < kGoldsteinMin || e.goldstein > kGoldsteinMax || e.avg_tone < kToneMin ||
      e.avg_tone > kToneMax)
    throw Error(ErrorKind::MalformedRow, "gdelt record out of range");
  return e;
}

inline json to_json(const AcledEvent& e) {
  return json{{"event_date", format_date(e.event_date)}, {"country", e.country}, {"fatalities", e.fatalities}};
}

inline AcledEvent acled_from_json(const json& j) {
  AcledEvent e;
  e.event_date = parse_date(j.at("event_date").get<std::string>());
  e.country = j.at("country").get<std::string>();
  e.fatalities = j.at("fatalities").get<std::int64_t>();
  if (e.fatalities < 0) throw Error(ErrorKind::MalformedRow, "negative fatalities");
  return e;
}

inline json to_json(const Article& a) {
  json dates = json::array();
  for (const auto& d : a.origin_event_dates) dates.push_back(format_date(d));
  return json{{"url", a.url},
              {"fetched_at", a.fetched_at},
              {"title", a.title},
              {"body", a.body},
              {"origin_event_dates", dates}};
}

inline Article article_from_json(const json& j) {
  Article a;
  a.url = j.at("url").get<std::string>();
  a.fetched_at = j.value("fetched_at", "");
  a.title = j.value("title", "");
  a.body = j.at("body").get<std::string>();
  for (const auto& d : j.value("origin_event_dates", json::array()))
    a.origin_event_dates.push_back(parse_date(d.get<std::string>()));
  return a;
}

inline json to_json(const RejectReport& r) {
  return json{{"count", r.count}, {"lines", r.lines}, {"reasons", r.reasons}};
}

}  // namespace cfh::ingestion
