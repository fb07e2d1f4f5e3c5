#pragma once

#include <algorithm>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cfh/evaluation/report.hpp"
#include "cfh/forecasting/prompt.hpp"
#include "cfh/forecasting/rag_context.hpp"
#include "cfh/forecasting/reply_parser.hpp"
#include "cfh/ingestion/acled.hpp"
#include "cfh/ingestion/compressed.hpp"
#include "cfh/ingestion/corpus.hpp"
#include "cfh/ingestion/fetch.hpp"
#include "cfh/ingestion/filter.hpp"
#include "cfh/ingestion/gdelt.hpp"
#include "cfh/labeling/quantile.hpp"
#include "cfh/labeling/series.hpp"
#include "cfh/llm/caching_client.hpp"
#include "cfh/llm/http_client.hpp"
#include "cfh/llm/mock.hpp"
#include "cfh/net/snapshot_transport.hpp"
#include "cfh/pipeline/config.hpp"
#include "cfh/pipeline/manifest.hpp"
#include "cfh/retrieval/chunk.hpp"
#include "cfh/retrieval/embed.hpp"
#include "cfh/retrieval/flat_index.hpp"

namespace cfh::pipeline {

enum ExitCode : int { kExitOk = 0, kExitPartial = 1, kExitUsage = 2 };

/// Everything a command needs besides the config. `network` is the transport
/// used for live HTTP (articles, provider, remote embeddings); it may be left
/// empty for fully offline configurations. `client` overrides the chat client
/// the config would build.
struct CommandContext {
  RunConfig config;
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
  std::shared_ptr<net::HttpTransport> network;
  std::shared_ptr<llm::ChatClient> client;
};

namespace detail {

inline std::shared_ptr<net::HttpTransport> require_network(const CommandContext& ctx, const std::string& why) {
  if (!ctx.network) throw Error(ErrorKind::Config, "no network transport available for " + why);
  return ctx.network;
}

inline void print_rejects(std::ostream& out, const std::string& origin, const ingestion::RejectReport& r) {
  if (r.count == 0) return;
  out << origin << ": " << r.count << " row(s) rejected";
  for (std::size_t i = 0; i < std::min<std::size_t>(r.lines.size(), 5); ++i)
    out << (i ? "; " : " (") << "line " << r.lines[i] << ": " << r.reasons[i];
  out << (r.lines.empty() ? "" : ")") << "\n";
}

inline DateWindow gdelt_window(const RunConfig& c) {
  return {first_day(add_months(c.range_start, -c.retrieval.context_months)), last_day(c.range_end)};
}

inline DateWindow acled_window(const RunConfig& c) { return {first_day(c.history_start), last_day(c.range_end)}; }

/// URL -> sorted unique dates of the events that cite it.
inline std::map<std::string, std::vector<Date>> cited_urls(const std::vector<ingestion::GdeltEvent>& events) {
  std::map<std::string, std::vector<Date>> out;
  for (const auto& e : events)
    if (e.source_url) out[*e.source_url].push_back(e.event_date);
  for (auto& [_, dates] : out) {
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
  }
  return out;
}

/// Brings the article set in line with the cited URLs: origin dates are
/// refreshed, URLs no longer cited are dropped, and (if `fetch`) missing URLs
/// are fetched. Returns the number of failed fetches.
inline std::size_t refresh_articles(const CommandContext& ctx, ingestion::Corpus& corpus, bool fetch) {
  const auto& cfg = ctx.config;
  auto urls = cited_urls(corpus.gdelt);
  std::vector<ingestion::Article> kept;
  for (auto& a : corpus.articles) {
    auto it = urls.find(a.url);
    if (it == urls.end()) continue;
    a.origin_event_dates = it->second;
    kept.push_back(std::move(a));
  }
  std::size_t failures = 0;
  if (fetch) {
    std::map<std::string, std::vector<Date>> missing;
    std::set<std::string> have;
    for (const auto& a : kept) have.insert(a.url);
    for (const auto& [url, dates] : urls)
      if (!have.contains(url)) missing.emplace(url, dates);
    std::shared_ptr<net::HttpTransport> http;
    if (cfg.ingestion.snapshot_dir) http = std::make_shared<net::SnapshotTransport>(*cfg.ingestion.snapshot_dir);
    else if (!missing.empty()) http = require_network(ctx, "article fetching");
    if (!missing.empty()) {
      auto result = ingestion::fetch_articles(missing, *http, cfg.ingestion.fetch);
      for (const auto& f : result.failures) *ctx.err << "fetch failed: " << f.url << ": " << f.reason << "\n";
      failures = result.failures.size();
      kept = ingestion::merge_articles(std::move(kept), result.articles);
      *ctx.out << "fetched " << result.articles.size() << " article(s), " << failures << " failure(s)\n";
    }
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.url < b.url; });
  corpus.articles = std::move(kept);
  return failures;
}

inline ingestion::CorpusManifest corpus_manifest(const RunConfig& cfg, const ingestion::Corpus& corpus) {
  ingestion::CorpusManifest m;
  m.countries = cfg.country_names();
  m.range_start = first_day(cfg.range_start);
  m.range_end = last_day(cfg.range_end);
  const auto window = gdelt_window(cfg);
  for (const auto& c : cfg.countries) {
    ingestion::CountryCount cc{c.name, ingestion::filter_events(corpus.gdelt, c.iso3, window).size(), 0};
    std::set<std::string> urls;
    for (const auto& e : ingestion::filter_events(corpus.gdelt, c.iso3, window))
      if (e.source_url) urls.insert(*e.source_url);
    for (const auto& a : corpus.articles) cc.article_count += urls.contains(a.url) ? 1 : 0;
    m.per_country.push_back(cc);
  }
  return m;
}

inline std::unique_ptr<retrieval::Embedder> make_embedder(const CommandContext& ctx) {
  const auto& e = ctx.config.retrieval.embedder;
  if (e.kind == "remote")
    return std::make_unique<retrieval::RemoteEmbedder>(e.remote, require_network(ctx, "remote embeddings"));
  return std::make_unique<retrieval::HashingEmbedder>(e.dims, e.seed);
}

inline std::shared_ptr<llm::ChatClient> make_client(const CommandContext& ctx) {
  if (ctx.client) return ctx.client;
  const auto& cfg = ctx.config;
  std::shared_ptr<llm::ReplayCache> cache;
  if (cfg.cache.mode != llm::CacheMode::Off) {
    const auto dir = cfg.cache.dir ? *cfg.cache.dir : cfg.run_dir() / "cache";
    cache = std::make_shared<llm::ReplayCache>(dir);
  }
  std::shared_ptr<llm::ChatClient> inner;
  if (cfg.provider.kind == "mock") {
    auto script = llm::mock_script_from_json(json::parse(io::read_file(*cfg.provider.mock_script)));
    inner = std::make_shared<llm::MockClient>(std::move(script), cfg.seed);
  } else if (cfg.cache.mode == llm::CacheMode::Replay) {
    return std::make_shared<llm::ReplayOnlyClient>(cache);
  } else {
    llm::HttpChatClient::Options opts;
    opts.jitter_seed = cfg.seed;
    inner = std::make_shared<llm::HttpChatClient>(cfg.provider.http, require_network(ctx, "the LLM provider"),
                                                  std::move(opts));
  }
  if (!cache) return inner;
  return std::make_shared<llm::CachingClient>(std::move(inner), std::move(cache), cfg.cache.mode);
}

inline std::string load_template(const std::optional<fs::path>& path, std::string_view fallback) {
  return path ? io::read_file(*path) : std::string(fallback);
}

inline std::string experiment_dir(forecasting::Experiment e) {
  return e == forecasting::Experiment::Parametric ? "parametric" : "rag";
}

inline fs::path task_dir(const RunConfig& cfg, const forecasting::ForecastTask& t) {
  return cfg.run_dir() / t.country.name / format_month(t.target_month) / experiment_dir(t.experiment);
}

/// Reads predictions written so far. A trailing partial line left by an
/// interrupted run is dropped.
inline std::vector<evaluation::PredictionRecord> read_existing_predictions(const fs::path& path) {
  std::vector<evaluation::PredictionRecord> out;
  std::error_code ec;
  if (!fs::exists(path, ec)) return out;
  const auto content = io::read_file(path);
  for (auto line : text::split(content, '\n')) {
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(evaluation::prediction_from_json(json::parse(line)));
    } catch (const std::exception&) {
      // incomplete record from an interrupted append
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------- ingest

inline int cmd_ingest(CommandContext& ctx, bool fetch_articles) {
  const auto& cfg = ctx.config;
  RunManifest manifest(cfg);
  std::map<std::string, fs::path> inputs;
  for (std::size_t i = 0; i < cfg.ingestion.gdelt_files.size(); ++i)
    inputs["gdelt[" + std::to_string(i) + "]"] = cfg.ingestion.gdelt_files[i];
  if (!cfg.ingestion.acled_file) throw Error(ErrorKind::Config, "$.ingestion.acled_file is not set");
  inputs["acled"] = *cfg.ingestion.acled_file;
  manifest.begin_stage("ingest", inputs);

  ingestion::Corpus corpus;
  json rejects = json::object();
  const auto columns = cfg.ingestion.column_map();
  const auto gwin = detail::gdelt_window(cfg);
  std::set<std::string> codes;
  for (const auto& c : cfg.countries) codes.insert(c.iso3);
  for (const auto& path : cfg.ingestion.gdelt_files) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::Io, "GDELT file not found: " + path.string());
    auto parsed = ingestion::parse_gdelt_export(ingestion::read_maybe_compressed(path), columns);
    detail::print_rejects(*ctx.out, path.string(), parsed.rejects);
    rejects[path.filename().string()] = ingestion::to_json(parsed.rejects);
    for (auto& e : parsed.records) {
      if (!gwin.contains(e.event_date)) continue;
      const bool hit = (e.actor1_country && codes.contains(*e.actor1_country)) ||
                       (e.actor2_country && codes.contains(*e.actor2_country));
      if (hit) corpus.gdelt.push_back(std::move(e));
    }
  }

  {
    const auto& path = *cfg.ingestion.acled_file;
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::Io, "ACLED file not found: " + path.string());
    auto parsed = ingestion::parse_acled_csv(io::read_file(path));
    detail::print_rejects(*ctx.out, path.string(), parsed.rejects);
    rejects[path.filename().string()] = ingestion::to_json(parsed.rejects);
    const auto awin = detail::acled_window(cfg);
    for (const auto& c : cfg.countries) {
      auto kept = ingestion::filter_events(parsed.records, c.name, awin);
      corpus.acled.insert(corpus.acled.end(), kept.begin(), kept.end());
    }
  }

  std::error_code ec;
  if (fs::exists(cfg.corpus_dir() / "articles.jsonl", ec))
    corpus.articles = ingestion::deserialize_articles(io::read_file(cfg.corpus_dir() / "articles.jsonl"));
  const auto failures = detail::refresh_articles(ctx, corpus, fetch_articles || cfg.ingestion.fetch_articles);

  auto cm = detail::corpus_manifest(cfg, corpus);
  ingestion::write_corpus(cfg.corpus_dir(), corpus, cm);
  io::write_file_atomic(cfg.corpus_dir() / "rejects.json", rejects.dump(2) + "\n");
  const auto checksum = ingestion::corpus_checksum(corpus);
  *ctx.out << "corpus: " << corpus.gdelt.size() << " GDELT event(s), " << corpus.acled.size() << " ACLED event(s), "
           << corpus.articles.size() << " article(s); checksum " << checksum << "\n";
  manifest.end_stage("ingest", failures ? "partial" : "ok",
                     {{"corpus_checksum", checksum}, {"article_fetch_failures", failures}});
  return failures ? kExitPartial : kExitOk;
}

inline int cmd_fetch_articles(CommandContext& ctx) {
  const auto& cfg = ctx.config;
  RunManifest manifest(cfg);
  manifest.begin_stage("fetch-articles", {{"corpus_manifest", cfg.corpus_dir() / "manifest.json"}});
  auto corpus = ingestion::load_corpus(cfg.corpus_dir());
  const auto failures = detail::refresh_articles(ctx, corpus, true);
  ingestion::write_corpus(cfg.corpus_dir(), corpus, detail::corpus_manifest(cfg, corpus));
  manifest.end_stage("fetch-articles", failures ? "partial" : "ok",
                     {{"articles", corpus.articles.size()}, {"failures", failures}});
  return failures ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------- build-index

inline int cmd_build_index(CommandContext& ctx) {
  const auto& cfg = ctx.config;
  RunManifest manifest(cfg);
  manifest.begin_stage("build-index", {{"corpus_manifest", cfg.corpus_dir() / "manifest.json"}});
  const auto corpus = ingestion::load_corpus(cfg.corpus_dir());
  const auto chunks = retrieval::chunk_articles(corpus.articles, cfg.retrieval.chunking);
  auto embedder = detail::make_embedder(ctx);
  retrieval::FlatIndex index(embedder->dims());
  std::vector<json> rows;
  std::size_t skipped = 0;
  for (const auto& c : chunks) {
    try {
      index.add(c.id(), embedder->embed(c.text));
      rows.push_back(retrieval::to_json(c));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotEmbeddable) throw;
      ++skipped;  // e.g. a chunk of pure punctuation
    }
  }
  io::write_file_atomic(cfg.index_dir() / "chunks.jsonl", io::to_jsonl(rows));
  index.save(cfg.index_dir() / "index.jsonl");
  io::write_file_atomic(cfg.index_dir() / "embedder.json",
                        json{{"name", embedder->name()}, {"dims", embedder->dims()}}.dump(2) + "\n");
  *ctx.out << "index: " << index.size() << " chunk(s) from " << corpus.articles.size() << " article(s)";
  if (skipped) *ctx.out << ", " << skipped << " unembeddable chunk(s) skipped";
  *ctx.out << "\n";
  manifest.end_stage("build-index", "ok", {{"chunks", index.size()}, {"skipped", skipped}});
  return kExitOk;
}

// ---------------------------------------------------------------- make-labels

struct LabelSet {
  std::vector<evaluation::LabelRecord> labels;
  std::map<std::string, labeling::QuantileBins> bins;
};

/// Truth labels for every grid target month plus per-country quantile bins
/// fitted on the months before the first target.
inline LabelSet compute_labels(const RunConfig& cfg, const std::vector<ingestion::AcledEvent>& acled) {
  LabelSet out;
  const auto targets = forecasting::target_months(cfg.range_start, cfg.range_end);
  const int w = cfg.labeling.window_months;
  for (const auto& country : cfg.countries) {
    const auto series = labeling::monthly_series(acled, country.name, cfg.history_start, cfg.range_end);
    const auto sums = series.sums();
    auto at = [&](Month m) { return static_cast<std::size_t>(months_between(cfg.history_start, m)); };

    std::vector<double> history;
    for (std::size_t i = 0; i < at(targets.front()); ++i) history.push_back(static_cast<double>(sums[i]));
    auto bins = labeling::compute_quantile_bins(history, cfg.bins_k);

    for (auto t : targets) {
      const auto idx = at(t);
      evaluation::LabelRecord r;
      r.country = country.name;
      r.target_month = t;
      r.truth_fatalities = sums[idx];
      r.trailing.assign(sums.begin() + static_cast<std::ptrdiff_t>(idx) - w, sums.begin() + static_cast<std::ptrdiff_t>(idx));
      const std::vector<std::int64_t> window(sums.begin() + static_cast<std::ptrdiff_t>(idx) - w,
                                             sums.begin() + static_cast<std::ptrdiff_t>(idx) + 1);
      r.truth_label = labeling::trend_label(window, cfg.labeling);
      r.truth_bin = labeling::assign_bin(static_cast<double>(r.truth_fatalities), bins);
      out.labels.push_back(std::move(r));
    }
    out.bins.emplace(country.name, std::move(bins));
  }
  return out;
}

inline int cmd_make_labels(CommandContext& ctx) {
  const auto& cfg = ctx.config;
  RunManifest manifest(cfg);
  manifest.begin_stage("make-labels", {{"corpus_manifest", cfg.corpus_dir() / "manifest.json"}});
  const auto corpus = ingestion::load_corpus(cfg.corpus_dir());
  const auto set = compute_labels(cfg, corpus.acled);
  std::vector<json> rows;
  for (const auto& l : set.labels) rows.push_back(evaluation::to_json(l));
  io::write_file_atomic(cfg.labels_path(), io::to_jsonl(rows));
  json bins = json::object();
  for (const auto& [country, b] : set.bins) {
    bins[country] = labeling::to_json(b);
    if (b.collapsed())
      *ctx.out << country << ": " << b.collapsed() << " quantile bin(s) collapsed, " << b.bin_count()
               << " effective\n";
  }
  io::write_file_atomic(cfg.bins_path(), bins.dump(2) + "\n");
  *ctx.out << "labels: " << set.labels.size() << " target month(s) across " << cfg.countries.size()
           << " countr" << (cfg.countries.size() == 1 ? "y" : "ies") << "\n";
  manifest.end_stage("make-labels", "ok", {{"labels", set.labels.size()}});
  return kExitOk;
}

inline std::map<std::string, labeling::QuantileBins> read_bins(const fs::path& path) {
  std::map<std::string, labeling::QuantileBins> out;
  const auto doc = json::parse(io::read_file(path));
  for (auto it = doc.begin(); it != doc.end(); ++it) out.emplace(it.key(), labeling::bins_from_json(it.value()));
  return out;
}

// ---------------------------------------------------------------- run

inline std::vector<forecasting::ForecastTask> run_grid(const RunConfig& cfg) {
  return forecasting::task_grid(cfg.countries, cfg.range_start, cfg.range_end, experiments_of(cfg.experiment));
}

struct RunResources {
  std::string parametric_template;
  std::string rag_template;
  std::map<std::string, evaluation::LabelRecord> labels;
  std::optional<ingestion::Corpus> corpus;
  std::optional<retrieval::FlatIndex> index;
  std::unordered_map<std::string, retrieval::Chunk> chunks;
  std::unique_ptr<retrieval::Embedder> embedder;
  std::shared_ptr<llm::ChatClient> client;
};

inline evaluation::PredictionRecord execute_task(const RunConfig& cfg, const forecasting::ForecastTask& task,
                                                 RunResources& res) {
  evaluation::PredictionRecord rec;
  rec.task = task;
  rec.model_id = cfg.model_id;
  const auto& truth = res.labels.at(task.country.name + "/" + format_month(task.target_month));
  rec.truth_label = truth.truth_label;
  rec.truth_fatalities = truth.truth_fatalities;

  const auto dir = detail::task_dir(cfg, task);
  std::string prompt;
  if (task.experiment == forecasting::Experiment::Rag) {
    forecasting::RetrievalSettings settings{cfg.retrieval.k, cfg.retrieval.context_months, cfg.retrieval.summarizer};
    forecasting::RetrievalStore store{*res.corpus, *res.index, res.chunks};
    auto* summarizer = cfg.retrieval.summarizer_kind == "llm" ? res.client.get() : nullptr;
    const auto context = forecasting::build_rag_context(task, store, *res.embedder, summarizer, settings);
    rec.empty_context = context.empty_context;
    io::write_file_atomic(dir / "context.json", forecasting::to_json(context).dump(2) + "\n");
    prompt = forecasting::render_prompt_rag(task, context, res.rag_template);
  } else {
    prompt = forecasting::render_prompt_parametric(task, res.parametric_template);
  }
  io::write_file_atomic(dir / "prompt.txt", prompt);

  llm::ChatRequest req;
  req.model_id = cfg.model_id;
  req.temperature = cfg.temperature;
  req.max_tokens = cfg.max_tokens;
  req.system_text = std::string(forecasting::kSystemPrompt);
  req.user_text = prompt;
  req.tags = {{"country", task.country.name},
              {"month", format_month(task.target_month)},
              {"experiment", std::string(forecasting::to_string(task.experiment))},
              {"purpose", "forecast"}};
  std::string reply;
  try {
    reply = res.client->complete(req);
  } catch (const Error& e) {
    rec.parse_failed = true;
    rec.error = std::string(to_string(e.kind()));
    io::write_file_atomic(dir / "error.txt", std::string(e.what()) + "\n");
    return rec;
  }
  io::write_file_atomic(dir / "reply.txt", reply);
  try {
    rec.predicted = forecasting::parse_forecast(reply);
  } catch (const Error& e) {
    rec.parse_failed = true;
    rec.error = std::string(to_string(e.kind()));
  }
  return rec;
}

inline int cmd_run(CommandContext& ctx) {
  const auto& cfg = ctx.config;
  RunManifest manifest(cfg);
  std::map<std::string, fs::path> inputs{{"labels", cfg.labels_path()}};
  if (cfg.provider.mock_script) inputs["mock_script"] = *cfg.provider.mock_script;
  const bool rag = cfg.experiment != ExperimentSelection::Parametric;
  if (rag) {
    inputs["corpus_manifest"] = cfg.corpus_dir() / "manifest.json";
    inputs["index"] = cfg.index_dir() / "index.jsonl";
  }
  manifest.begin_stage("run", inputs);

  RunResources res;
  res.parametric_template = detail::load_template(cfg.parametric_template, forecasting::kDefaultParametricTemplate);
  res.rag_template = detail::load_template(cfg.rag_template, forecasting::kDefaultRagTemplate);
  for (const auto& l : evaluation::read_labels(cfg.labels_path())) res.labels.emplace(l.key(), l);

  const auto grid = run_grid(cfg);
  for (const auto& t : grid) {
    if (!res.labels.contains(t.country.name + "/" + format_month(t.target_month)))
      throw Error(ErrorKind::Config, "no label for " + t.key() + "; run make-labels first");
  }
  // Template problems are configuration errors, so surface them before any request.
  if (!grid.empty()) {
    forecasting::render_prompt_parametric(grid.front(), res.parametric_template);
    forecasting::render_prompt_rag(grid.front(), forecasting::RagContext{}, res.rag_template);
  }
  if (rag) {
    res.corpus = ingestion::load_corpus(cfg.corpus_dir());
    res.index.emplace(retrieval::FlatIndex::load(cfg.index_dir() / "index.jsonl"));
    for (const auto& row : io::read_jsonl(cfg.index_dir() / "chunks.jsonl")) {
      auto c = retrieval::chunk_from_json(row);
      res.chunks.emplace(c.id(), std::move(c));
    }
    res.embedder = detail::make_embedder(ctx);
    if (res.embedder->dims() != res.index->dims())
      throw Error(ErrorKind::Config, "embedder dims differ from the index; rebuild the index");
  }
  res.client = detail::make_client(ctx);

  auto existing = detail::read_existing_predictions(cfg.predictions_path());
  std::set<std::string> done;
  for (const auto& r : existing) done.insert(r.task.key());
  std::vector<forecasting::ForecastTask> todo;
  for (const auto& t : grid)
    if (!done.contains(t.key())) todo.push_back(t);
  *ctx.out << "run " << cfg.run_id << ": " << grid.size() << " task(s), " << (grid.size() - todo.size())
           << " already done\n";

  // Records are appended batch by batch so an interrupted run loses at most
  // one batch of work.
  for (std::size_t start = 0; start < todo.size(); start += cfg.parallelism) {
    const auto end = std::min(todo.size(), start + cfg.parallelism);
    std::vector<std::future<evaluation::PredictionRecord>> futures;
    for (auto i = start; i < end; ++i)
      futures.push_back(std::async(std::launch::async, [&, i] { return execute_task(cfg, todo[i], res); }));
    std::string lines;
    for (auto& f : futures) {
      auto rec = f.get();
      lines += evaluation::to_json(rec).dump() + "\n";
      existing.push_back(std::move(rec));
    }
    io::append_file(cfg.predictions_path(), lines);
  }

  // Final form is grid order regardless of how many sessions produced it.
  std::map<std::string, const evaluation::PredictionRecord*> by_key;
  for (const auto& r : existing) by_key.emplace(r.task.key(), &r);
  std::string ordered;
  std::size_t failed = 0;
  std::set<std::string> written;
  for (const auto& t : grid) {
    auto it = by_key.find(t.key());
    if (it == by_key.end()) continue;
    ordered += evaluation::to_json(*it->second).dump() + "\n";
    written.insert(t.key());
    if (it->second->parse_failed) ++failed;
  }
  for (const auto& r : existing)
    if (!written.contains(r.task.key()) && written.insert(r.task.key()).second) ordered += evaluation::to_json(r).dump() + "\n";
  io::write_file_atomic(cfg.predictions_path(), ordered);

  *ctx.out << "predictions: " << by_key.size() << " record(s), " << failed << " failed\n";
  manifest.end_stage("run", failed ? "partial" : "ok",
                     {{"tasks", grid.size()}, {"executed", todo.size()}, {"failed", failed}});
  return failed ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------- evaluate / report

inline std::map<evaluation::ReportKey, evaluation::MetricsReport> evaluate_run(const RunConfig& cfg) {
  std::error_code ec;
  if (!fs::exists(cfg.predictions_path(), ec))
    throw Error(ErrorKind::Io, "predictions not found: " + cfg.predictions_path().string());
  if (!fs::exists(cfg.labels_path(), ec)) throw Error(ErrorKind::Io, "labels not found: " + cfg.labels_path().string());
  const auto predictions = evaluation::read_predictions(cfg.predictions_path());
  const auto labels = evaluation::index_labels(evaluation::read_labels(cfg.labels_path()));
  const auto bins = read_bins(cfg.bins_path());

  if (std::none_of(predictions.begin(), predictions.end(), [](const auto& r) { return r.scorable(); }))
    throw Error(ErrorKind::NoScorableRecords, "no scorable records in " + cfg.predictions_path().string());

  std::map<evaluation::ReportKey, std::vector<evaluation::PredictionRecord>> cells;
  for (const auto& r : predictions) cells[{r.model_id, r.task.experiment, r.task.country.name}].push_back(r);

  const evaluation::TrailingLookup trailing =
      [&](const evaluation::PredictionRecord& r) -> std::optional<std::vector<std::int64_t>> {
    auto it = labels.find(r.task.country.name + "/" + format_month(r.task.target_month));
    if (it == labels.end()) return std::nullopt;
    return it->second.trailing;
  };
  std::map<evaluation::ReportKey, evaluation::MetricsReport> reports;
  for (const auto& [key, records] : cells)
    reports.emplace(key, evaluation::evaluate_all(records, bins, cfg.labeling, trailing));
  return reports;
}

inline int cmd_evaluate(CommandContext& ctx) {
  const auto& cfg = ctx.config;
  RunManifest manifest(cfg);
  manifest.begin_stage("evaluate", {{"predictions", cfg.predictions_path()}, {"labels", cfg.labels_path()}});
  const auto reports = evaluate_run(cfg);
  const auto md = evaluation::render_report(reports, evaluation::ReportFormat::Markdown, cfg.country_names());
  const auto csv = evaluation::render_report(reports, evaluation::ReportFormat::Csv, cfg.country_names());
  io::write_file_atomic(cfg.run_dir() / "report.md", md);
  io::write_file_atomic(cfg.run_dir() / "report.csv", csv);
  *ctx.out << "wrote " << (cfg.run_dir() / "report.md").string() << " and report.csv\n";
  manifest.end_stage("evaluate", "ok", {{"cells", reports.size()}});
  return kExitOk;
}

inline int cmd_report(CommandContext& ctx, evaluation::ReportFormat format) {
  const auto reports = evaluate_run(ctx.config);
  *ctx.out << evaluation::render_report(reports, format, ctx.config.country_names());
  return kExitOk;
}

}  // namespace cfh::pipeline
