#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfh/forecasting/task.hpp"
#include "cfh/ingestion/fetch.hpp"
#include "cfh/ingestion/gdelt.hpp"
#include "cfh/io.hpp"
#include "cfh/labeling/trend.hpp"
#include "cfh/llm/http_client.hpp"
#include "cfh/llm/replay_cache.hpp"
#include "cfh/retrieval/chunk.hpp"
#include "cfh/retrieval/summarize.hpp"

namespace cfh::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

enum class ExperimentSelection { Parametric, Rag, Both };

inline std::vector<forecasting::Experiment> experiments_of(ExperimentSelection s) {
  switch (s) {
    case ExperimentSelection::Parametric: return {forecasting::Experiment::Parametric};
    case ExperimentSelection::Rag: return {forecasting::Experiment::Rag};
    case ExperimentSelection::Both: return {forecasting::Experiment::Parametric, forecasting::Experiment::Rag};
  }
  return {};
}

struct ProviderSettings {
  std::string kind = "openai";  // openai | mock
  llm::ProviderConfig http;
  std::optional<fs::path> mock_script;
};

struct CacheSettings {
  llm::CacheMode mode = llm::CacheMode::Off;
  std::optional<fs::path> dir;
};

struct EmbedderSettings {
  std::string kind = "hashing";  // hashing | remote
  std::size_t dims = 256;
  std::uint64_t seed = retrieval::HashingEmbedder::kDefaultSeed;
  retrieval::RemoteEmbedderConfig remote;
};

struct RetrievalConfig {
  std::size_t k = 12;
  int context_months = 3;
  retrieval::ChunkingConfig chunking;
  EmbedderSettings embedder;
  std::string summarizer_kind = "llm";  // llm | extractive
  retrieval::SummarizerConfig summarizer;
};

struct IngestionConfig {
  std::vector<fs::path> gdelt_files;
  int gdelt_version = 2;
  std::map<std::string, std::size_t> gdelt_columns;  // overrides on top of the version defaults
  std::optional<fs::path> acled_file;
  bool fetch_articles = false;
  std::optional<fs::path> snapshot_dir;  // serve article URLs from a local snapshot instead of the network
  ingestion::FetchConfig fetch;

  ingestion::ColumnMap column_map() const {
    auto map = gdelt_version == 1 ? ingestion::gdelt1_default_columns() : ingestion::gdelt2_default_columns();
    for (const auto& [k, v] : gdelt_columns) map[k] = v;
    return map;
  }
};

struct RunConfig {
  std::string run_id = "default";
  std::vector<forecasting::Country> countries;
  Month range_start = Month{std::chrono::year{2020}, std::chrono::month{1}};
  Month range_end = Month{std::chrono::year{2024}, std::chrono::month{12}};
  Month history_start = Month{std::chrono::year{2017}, std::chrono::month{1}};
  ExperimentSelection experiment = ExperimentSelection::Both;
  std::string model_id = "gpt-4";
  double temperature = llm::kDefaultTemperature;
  int max_tokens = 256;
  std::uint64_t seed = 0;
  std::size_t parallelism = 4;
  ProviderSettings provider;
  CacheSettings cache;
  labeling::LabelingConfig labeling;
  int bins_k = 4;
  RetrievalConfig retrieval;
  IngestionConfig ingestion;
  std::optional<fs::path> parametric_template;
  std::optional<fs::path> rag_template;
  fs::path data_dir = "data";
  fs::path runs_dir = "runs";
  json snapshot;  // the config document as loaded

  fs::path run_dir() const { return runs_dir / run_id; }
  fs::path corpus_dir() const { return run_dir() / "corpus"; }
  fs::path index_dir() const { return run_dir() / "index"; }
  fs::path labels_path() const { return run_dir() / "labels.jsonl"; }
  fs::path bins_path() const { return run_dir() / "bins.json"; }
  fs::path predictions_path() const { return run_dir() / "predictions.jsonl"; }

  std::vector<std::string> country_names() const {
    std::vector<std::string> out;
    for (const auto& c : countries) out.push_back(c.name);
    return out;
  }
};

inline std::vector<forecasting::Country> default_countries() {
  return {{"Ethiopia", "ETH"}, {"Sudan", "SDN"}, {"Somalia", "SOM"}, {"Israel", "ISR"}, {"Iran", "IRN"}};
}

namespace detail {

/// Walks one JSON object, remembering which keys were consumed so that
/// anything left over can be reported with its full path.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::Config, where + ": " + what);
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (const json* v = raw(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception&) {
        fail(where(key), "has the wrong type");
      }
    }
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    if (raw(key)) {
      T tmp{};
      read(key, tmp);
      out = std::move(tmp);
    }
  }

  void read_month(const std::string& key, Month& out) {
    if (const json* v = raw(key)) {
      auto m = v->is_string() ? try_parse_month(v->get<std::string>()) : std::nullopt;
      if (!m) fail(where(key), "expected a YYYY-MM month");
      out = *m;
    }
  }

  void read_path(const std::string& key, std::optional<fs::path>& out, const fs::path& base) {
    std::optional<std::string> s;
    read(key, s);
    if (s) out = resolve(*s, base);
  }

  static fs::path resolve(const std::string& s, const fs::path& base) {
    fs::path p(s);
    return p.is_absolute() || base.empty() ? p : base / p;
  }

  ObjectReader child(const std::string& key) {
    static const json kEmpty = json::object();
    const json* v = raw(key);
    return ObjectReader(v ? *v : kEmpty, where(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) fail(where(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

/// Parses a run config. Relative paths resolve against `base_dir`.
inline RunConfig parse_run_config(const json& doc, const fs::path& base_dir = {}) {
  using detail::ObjectReader;
  RunConfig c;
  c.snapshot = doc;
  ObjectReader r(doc, "$");
  r.read("run_id", c.run_id);
  if (c.run_id.empty() || c.run_id.find_first_of("/\\") != std::string::npos || c.run_id == "." || c.run_id == "..")
    ObjectReader::fail("$.run_id", "must be a plain non-empty name");

  if (const json* countries = r.raw("countries")) {
    if (!countries->is_array() || countries->empty()) ObjectReader::fail("$.countries", "expected a non-empty array");
    for (std::size_t i = 0; i < countries->size(); ++i) {
      const auto& item = (*countries)[i];
      const std::string where = "$.countries[" + std::to_string(i) + "]";
      forecasting::Country country;
      if (item.is_string()) {
        country.name = item.get<std::string>();
      } else {
        ObjectReader cr(item, where);
        cr.read("name", country.name);
        cr.read("iso3", country.iso3);
        cr.finish();
      }
      if (country.name.empty()) ObjectReader::fail(where, "country name is empty");
      if (country.iso3.empty()) {
        auto code = forecasting::lookup_iso3(country.name);
        if (!code) ObjectReader::fail(where, "no known ISO alpha-3 code for '" + country.name + "'; give iso3");
        country.iso3 = *code;
      }
      c.countries.push_back(std::move(country));
    }
  } else {
    c.countries = default_countries();
  }

  {
    auto dr = r.child("date_range");
    dr.read_month("start", c.range_start);
    dr.read_month("end", c.range_end);
    dr.finish();
    if (c.range_end <= c.range_start) ObjectReader::fail("$.date_range", "end must be after start");
  }
  r.read_month("history_start", c.history_start);

  std::string experiment = "Both";
  r.read("experiment", experiment);
  if (experiment == "Parametric") c.experiment = ExperimentSelection::Parametric;
  else if (experiment == "Rag") c.experiment = ExperimentSelection::Rag;
  else if (experiment == "Both") c.experiment = ExperimentSelection::Both;
  else ObjectReader::fail("$.experiment", "expected Parametric, Rag or Both");

  r.read("model_id", c.model_id);
  r.read("temperature", c.temperature);
  if (!(c.temperature >= 0 && c.temperature <= 2)) ObjectReader::fail("$.temperature", "must be in [0, 2]");
  r.read("max_tokens", c.max_tokens);
  if (c.max_tokens <= 0) ObjectReader::fail("$.max_tokens", "must be positive");
  r.read("seed", c.seed);
  r.read("parallelism", c.parallelism);
  if (c.parallelism == 0) ObjectReader::fail("$.parallelism", "must be at least 1");

  {
    auto p = r.child("provider");
    p.read("kind", c.provider.kind);
    if (c.provider.kind != "openai" && c.provider.kind != "mock")
      ObjectReader::fail("$.provider.kind", "expected openai or mock");
    p.read("endpoint_url", c.provider.http.endpoint_url);
    p.read("auth_token_env_var", c.provider.http.auth_token_env_var);
    p.read("max_retries", c.provider.http.max_retries);
    p.read("base_backoff_ms", c.provider.http.base_backoff_ms);
    p.read("max_backoff_ms", c.provider.http.max_backoff_ms);
    p.read("timeout_ms", c.provider.http.timeout_ms);
    p.read("requests_per_minute", c.provider.http.requests_per_minute);
    p.read_path("mock_script", c.provider.mock_script, base_dir);
    p.finish();
    if (c.provider.http.max_retries < 0) ObjectReader::fail("$.provider.max_retries", "must be >= 0");
    if (!(c.provider.http.requests_per_minute > 0))
      ObjectReader::fail("$.provider.requests_per_minute", "must be > 0");
    if (c.provider.kind == "mock" && !c.provider.mock_script)
      ObjectReader::fail("$.provider.mock_script", "required when provider.kind is mock");
  }

  {
    auto cr = r.child("cache");
    std::string mode = "Off";
    cr.read("mode", mode);
    try {
      c.cache.mode = llm::cache_mode_from_string(mode);
    } catch (const Error&) {
      ObjectReader::fail("$.cache.mode", "expected Off, Record, Replay or ReplayThenRecord");
    }
    cr.read_path("dir", c.cache.dir, base_dir);
    cr.finish();
  }

  {
    auto l = r.child("labeling");
    l.read("window_months", c.labeling.window_months);
    l.read("slope_threshold", c.labeling.slope_threshold);
    l.read("slope_relative", c.labeling.slope_relative);
    l.read("slope_floor", c.labeling.slope_floor);
    l.read("peace_level", c.labeling.peace_level);
    l.read("ratio_threshold", c.labeling.ratio_threshold);
    l.read("bins_k", c.bins_k);
    l.finish();
    c.labeling.validate();
    if (c.bins_k < 2) ObjectReader::fail("$.labeling.bins_k", "must be >= 2");
  }
  if (add_months(c.history_start, c.labeling.window_months) > c.range_start)
    ObjectReader::fail("$.history_start", "must leave at least window_months of history before date_range.start");

  {
    auto rr = r.child("retrieval");
    rr.read("k", c.retrieval.k);
    rr.read("context_months", c.retrieval.context_months);
    rr.read("chunk_chars", c.retrieval.chunking.chunk_chars);
    rr.read("overlap_chars", c.retrieval.chunking.overlap_chars);
    rr.read("boundary_slack", c.retrieval.chunking.boundary_slack);
    if (c.retrieval.k == 0) ObjectReader::fail("$.retrieval.k", "must be at least 1");
    if (c.retrieval.context_months < 1) ObjectReader::fail("$.retrieval.context_months", "must be at least 1");
    if (c.retrieval.chunking.overlap_chars >= c.retrieval.chunking.chunk_chars)
      ObjectReader::fail("$.retrieval", "overlap_chars must be smaller than chunk_chars");
    {
      auto e = rr.child("embedder");
      e.read("kind", c.retrieval.embedder.kind);
      e.read("dims", c.retrieval.embedder.dims);
      e.read("seed", c.retrieval.embedder.seed);
      e.read("endpoint_url", c.retrieval.embedder.remote.endpoint_url);
      e.read("model", c.retrieval.embedder.remote.model);
      e.read("auth_token_env_var", c.retrieval.embedder.remote.auth_token_env_var);
      e.read("timeout_ms", c.retrieval.embedder.remote.timeout_ms);
      e.finish();
      if (c.retrieval.embedder.kind != "hashing" && c.retrieval.embedder.kind != "remote")
        ObjectReader::fail("$.retrieval.embedder.kind", "expected hashing or remote");
      if (c.retrieval.embedder.dims == 0) ObjectReader::fail("$.retrieval.embedder.dims", "must be positive");
      c.retrieval.embedder.remote.dims = c.retrieval.embedder.dims;
    }
    {
      auto s = rr.child("summarizer");
      s.read("kind", c.retrieval.summarizer_kind);
      s.read("model_id", c.retrieval.summarizer.model_id);
      s.read("char_budget", c.retrieval.summarizer.char_budget);
      s.read("request_char_budget", c.retrieval.summarizer.request_char_budget);
      s.finish();
      if (c.retrieval.summarizer_kind != "llm" && c.retrieval.summarizer_kind != "extractive")
        ObjectReader::fail("$.retrieval.summarizer.kind", "expected llm or extractive");
      c.retrieval.summarizer.temperature = c.temperature;
    }
    rr.finish();
  }

  {
    auto in = r.child("ingestion");
    std::vector<std::string> gdelt;
    in.read("gdelt_files", gdelt);
    for (const auto& g : gdelt) c.ingestion.gdelt_files.push_back(detail::ObjectReader::resolve(g, base_dir));
    in.read("gdelt_version", c.ingestion.gdelt_version);
    if (c.ingestion.gdelt_version != 1 && c.ingestion.gdelt_version != 2)
      ObjectReader::fail("$.ingestion.gdelt_version", "expected 1 or 2");
    in.read("gdelt_columns", c.ingestion.gdelt_columns);
    in.read_path("acled_file", c.ingestion.acled_file, base_dir);
    in.read("fetch_articles", c.ingestion.fetch_articles);
    in.read_path("snapshot_dir", c.ingestion.snapshot_dir, base_dir);
    {
      auto f = in.child("fetch");
      f.read("concurrency", c.ingestion.fetch.concurrency);
      f.read("politeness_ms", c.ingestion.fetch.politeness_ms);
      f.read("max_chars", c.ingestion.fetch.extraction.max_chars);
      f.read("min_chars", c.ingestion.fetch.extraction.min_chars);
      f.read("timeout_ms", c.ingestion.fetch.extraction.timeout_ms);
      f.finish();
    }
    in.finish();
  }

  {
    auto p = r.child("prompts");
    p.read_path("parametric", c.parametric_template, base_dir);
    p.read_path("rag", c.rag_template, base_dir);
    p.finish();
  }

  {
    auto p = r.child("paths");
    std::string data_dir = c.data_dir.string(), runs_dir = c.runs_dir.string();
    p.read("data_dir", data_dir);
    p.read("runs_dir", runs_dir);
    p.finish();
    c.data_dir = ObjectReader::resolve(data_dir, base_dir);
    c.runs_dir = ObjectReader::resolve(runs_dir, base_dir);
  }

  r.finish();
  return c;
}

inline RunConfig load_run_config(const fs::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error&) {
    throw Error(ErrorKind::Config, "cannot read config " + path.string());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, path.string() + ": " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

}  // namespace cfh::pipeline
