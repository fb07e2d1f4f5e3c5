#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cfh/hashing.hpp"
#include "cfh/ingestion/records.hpp"
#include "cfh/io.hpp"

namespace cfh::ingestion {

struct Corpus {
  std::vector<GdeltEvent> gdelt;
  std::vector<AcledEvent> acled;
  std::vector<Article> articles;  // unique by URL, sorted by URL
};

struct CountryCount {
  std::string country;
  std::size_t event_count = 0;
  std::size_t article_count = 0;
};

struct CorpusManifest {
  std::vector<std::string> countries;
  Date range_start;
  Date range_end;
  std::size_t article_count = 0;
  std::size_t event_count = 0;  // GDELT events
  std::size_t acled_count = 0;
  std::vector<CountryCount> per_country;
  std::string checksum;
};

inline std::string serialize_gdelt(const std::vector<GdeltEvent>& events) {
  std::string out;
  for (const auto& e : events) out += to_json(e).dump() + "\n";
  return out;
}

inline std::string serialize_acled(const std::vector<AcledEvent>& events) {
  std::string out;
  for (const auto& e : events) out += to_json(e).dump() + "\n";
  return out;
}

inline std::string serialize_articles(const std::vector<Article>& articles) {
  std::string out;
  for (const auto& a : articles) out += to_json(a).dump() + "\n";
  return out;
}

inline std::vector<GdeltEvent> deserialize_gdelt(std::string_view content) {
  std::vector<GdeltEvent> out;
  for (const auto& j : io::parse_jsonl(content, "events.jsonl")) out.push_back(gdelt_from_json(j));
  return out;
}

inline std::vector<AcledEvent> deserialize_acled(std::string_view content) {
  std::vector<AcledEvent> out;
  for (const auto& j : io::parse_jsonl(content, "acled.jsonl")) out.push_back(acled_from_json(j));
  return out;
}

inline std::vector<Article> deserialize_articles(std::string_view content) {
  std::vector<Article> out;
  for (const auto& j : io::parse_jsonl(content, "articles.jsonl")) out.push_back(article_from_json(j));
  return out;
}

/// Content hash of the normalized corpus. Article fetch timestamps are
/// excluded: they describe when, not what.
inline std::string corpus_checksum(const Corpus& corpus) {
  Sha256 h;
  h.update("events\n").update(serialize_gdelt(corpus.gdelt));
  h.update("acled\n").update(serialize_acled(corpus.acled));
  h.update("articles\n");
  for (auto a : corpus.articles) {
    a.fetched_at.clear();
    h.update(to_json(a).dump()).update("\n");
  }
  return h.hex_digest();
}

/// Merges `incoming` into `existing`, keeping the first copy of each URL and
/// unioning origin dates.
inline std::vector<Article> merge_articles(std::vector<Article> existing, const std::vector<Article>& incoming) {
  std::map<std::string, Article> by_url;
  for (auto& a : existing) by_url.emplace(a.url, std::move(a));
  for (const auto& a : incoming) {
    auto [it, inserted] = by_url.emplace(a.url, a);
    if (!inserted) {
      auto& dates = it->second.origin_event_dates;
      dates.insert(dates.end(), a.origin_event_dates.begin(), a.origin_event_dates.end());
      std::sort(dates.begin(), dates.end());
      dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
    }
  }
  std::vector<Article> out;
  out.reserve(by_url.size());
  for (auto& [_, a] : by_url) out.push_back(std::move(a));
  return out;
}

inline nlohmann::json to_json(const CorpusManifest& m) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& c : m.per_country)
    per.push_back({{"country", c.country}, {"event_count", c.event_count}, {"article_count", c.article_count}});
  return {{"countries", m.countries},
          {"date_range", {format_date(m.range_start), format_date(m.range_end)}},
          {"article_count", m.article_count},
          {"event_count", m.event_count},
          {"acled_count", m.acled_count},
          {"per_country", per},
          {"checksum", m.checksum}};
}

inline CorpusManifest manifest_from_json(const nlohmann::json& j) {
  CorpusManifest m;
  m.countries = j.at("countries").get<std::vector<std::string>>();
  m.range_start = parse_date(j.at("date_range").at(0).get<std::string>());
  m.range_end = parse_date(j.at("date_range").at(1).get<std::string>());
  m.article_count = j.at("article_count").get<std::size_t>();
  m.event_count = j.at("event_count").get<std::size_t>();
  m.acled_count = j.at("acled_count").get<std::size_t>();
  for (const auto& c : j.at("per_country"))
    m.per_country.push_back({c.at("country").get<std::string>(), c.at("event_count").get<std::size_t>(),
                             c.at("article_count").get<std::size_t>()});
  m.checksum = j.at("checksum").get<std::string>();
  return m;
}

inline void write_corpus(const std::filesystem::path& dir, const Corpus& corpus, CorpusManifest manifest) {
  manifest.event_count = corpus.gdelt.size();
  manifest.acled_count = corpus.acled.size();
  manifest.article_count = corpus.articles.size();
  manifest.checksum = corpus_checksum(corpus);
  io::write_file_atomic(dir / "events.jsonl", serialize_gdelt(corpus.gdelt));
  io::write_file_atomic(dir / "acled.jsonl", serialize_acled(corpus.acled));
  io::write_file_atomic(dir / "articles.jsonl", serialize_articles(corpus.articles));
  io::write_file_atomic(dir / "manifest.json", to_json(manifest).dump(2) + "\n");
}

/// Loads a corpus directory and checks it against its manifest.
inline Corpus load_corpus(const std::filesystem::path& dir, CorpusManifest* manifest_out = nullptr) {
  Corpus c;
  c.gdelt = deserialize_gdelt(io::read_file(dir / "events.jsonl"));
  c.acled = deserialize_acled(io::read_file(dir / "acled.jsonl"));
  if (std::filesystem::exists(dir / "articles.jsonl"))
    c.articles = deserialize_articles(io::read_file(dir / "articles.jsonl"));
  auto manifest = manifest_from_json(nlohmann::json::parse(io::read_file(dir / "manifest.json")));
  if (manifest.event_count != c.gdelt.size() || manifest.acled_count != c.acled.size() ||
      manifest.article_count != c.articles.size())
    throw Error(ErrorKind::Io, "corpus in " + dir.string() + " does not match its manifest counts");
  if (manifest.checksum != corpus_checksum(c))
    throw Error(ErrorKind::Io, "corpus in " + dir.string() + " does not match its manifest checksum");
  if (manifest_out) *manifest_out = std::move(manifest);
  return c;
}

}  // namespace cfh::ingestion
