#pragma once

#include <array>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cfh/forecasting/task.hpp"
#include "cfh/ingestion/corpus.hpp"
#include "cfh/ingestion/filter.hpp"
#include "cfh/labeling/series.hpp"
#include "cfh/retrieval/flat_index.hpp"
#include "cfh/retrieval/summarize.hpp"

namespace cfh::forecasting {

inline constexpr std::size_t kWeeklyWindow = 12;

enum class IndicatorSource { RetrievedArticles, WindowEvents, None };

inline std::string_view to_string(IndicatorSource s) {
  switch (s) {
    case IndicatorSource::RetrievedArticles: return "retrieved_articles";
    case IndicatorSource::WindowEvents: return "window_events";
    case IndicatorSource::None: return "none";
  }
  return "";
}

struct RagContext {
  retrieval::Summary summary;
  double avg_tone = 0.0;
  double avg_goldstein = 0.0;
  std::array<std::int64_t, kWeeklyWindow> weekly_fatalities{};  // oldest first
  Date weekly_start;  // Monday of the first week
  Date weekly_end;    // Sunday of the last week, <= as_of
  IndicatorSource indicator_source = IndicatorSource::None;
  std::vector<retrieval::SearchHit> retrieved;
  bool empty_context = false;  // no GDELT events and no articles in the window
};

struct RetrievalSettings {
  std::size_t k = 12;
  int context_months = 3;
  retrieval::SummarizerConfig summarizer;
};

/// Query text for a task's context window.
inline std::string retrieval_query(const ForecastTask& task, int context_months = 3) {
  const auto window = task.context_window(context_months);
  return "armed conflict violence escalation " + task.country.name + " " +
         month_long_name(month_of(window.start)) + " - " + month_long_name(month_of(window.end));
}

/// The 12 complete ISO weeks ending on the last Sunday on or before `as_of`.
inline DateWindow weekly_window(Date as_of) {
  const Date last_monday = iso_week_start(as_of);
  const Date last_sunday = add_days(last_monday, 6) <= as_of ? add_days(last_monday, 6) : add_days(last_monday, -1);
  return {add_days(last_sunday, -static_cast<int>(kWeeklyWindow * 7) + 1), last_sunday};
}

/// An article may feed a task only if every event citing it precedes the
/// target month and at least one falls in the context window.
inline bool article_in_window(const ingestion::Article& a, DateWindow window) {
  if (a.origin_event_dates.empty()) return false;
  bool any = false;
  for (const auto& d : a.origin_event_dates) {
    if (d > window.end) return false;
    any = any || window.contains(d);
  }
  return any;
}

inline std::string doc_url_of(const std::string& chunk_id) { return chunk_id.substr(0, chunk_id.rfind('#')); }

struct RetrievalStore {
  const ingestion::Corpus& corpus;
  const retrieval::FlatIndex& index;
  const std::unordered_map<std::string, retrieval::Chunk>& chunks;  // by chunk id
};

inline RagContext build_rag_context(const ForecastTask& task, const RetrievalStore& store,
                                    retrieval::Embedder& embedder, llm::ChatClient* summarizer_client,
                                    const RetrievalSettings& settings = {}) {
  if (task.experiment != Experiment::Rag)
    throw Error(ErrorKind::InvalidArgument, "RAG context requested for a parametric task");
  const DateWindow window = task.context_window(settings.context_months);
  RagContext ctx;

  const auto window_events = ingestion::filter_events(store.corpus.gdelt, task.country.iso3, window);
  std::set<std::string> country_urls;
  for (const auto& e : window_events)
    if (e.source_url) country_urls.insert(*e.source_url);

  std::set<std::string> eligible;
  for (const auto& a : store.corpus.articles)
    if (country_urls.contains(a.url) && article_in_window(a, window)) eligible.insert(a.url);

  ctx.empty_context = window_events.empty() && eligible.empty();

  std::vector<retrieval::Chunk> ranked;
  if (!eligible.empty() && store.index.size() > 0) {
    const auto query = embedder.embed(retrieval_query(task, settings.context_months));
    ctx.retrieved = store.index.search(query, settings.k,
                                       [&](const std::string& id) { return eligible.contains(doc_url_of(id)); });
    for (const auto& hit : ctx.retrieved) {
      auto it = store.chunks.find(hit.id);
      if (it != store.chunks.end()) ranked.push_back(it->second);
    }
  }
  ctx.summary = retrieval::summarize(ranked, summarizer_client, settings.summarizer);

  std::set<std::string> retrieved_urls;
  for (const auto& hit : ctx.retrieved) retrieved_urls.insert(doc_url_of(hit.id));
  auto average = [&](bool only_retrieved) {
    double tone = 0, gold = 0;
    std::size_t n = 0;
    for (const auto& e : window_events) {
      if (only_retrieved && !(e.source_url && retrieved_urls.contains(*e.source_url))) continue;
      tone += e.avg_tone;
      gold += e.goldstein;
      ++n;
    }
    if (n > 0) {
      ctx.avg_tone = tone / static_cast<double>(n);
      ctx.avg_goldstein = gold / static_cast<double>(n);
    }
    return n;
  };
  if (average(true) > 0) ctx.indicator_source = IndicatorSource::RetrievedArticles;
  else if (average(false) > 0) ctx.indicator_source = IndicatorSource::WindowEvents;

  const auto weeks = weekly_window(task.as_of());
  const auto weekly =
      labeling::aggregate_fatalities(store.corpus.acled, task.country.name, labeling::Granularity::Weekly, weeks);
  for (std::size_t i = 0; i < kWeeklyWindow; ++i) ctx.weekly_fatalities[i] = weekly.buckets.at(i).fatalities;
  ctx.weekly_start = weeks.start;
  ctx.weekly_end = weeks.end;
  return ctx;
}

inline nlohmann::json to_json(const RagContext& c) {
  nlohmann::json hits = nlohmann::json::array();
  for (const auto& h : c.retrieved) hits.push_back({{"id", h.id}, {"score", h.score}});
  return {{"summary", retrieval::to_json(c.summary)},
          {"avg_tone", c.avg_tone},
          {"avg_goldstein", c.avg_goldstein},
          {"weekly_fatalities", c.weekly_fatalities},
          {"weekly_window", {format_date(c.weekly_start), format_date(c.weekly_end)}},
          {"indicator_source", to_string(c.indicator_source)},
          {"retrieved", hits},
          {"empty_context", c.empty_context}};
}

}  // namespace cfh::forecasting
