#include <gtest/gtest.h>

#include <random>

#include "cfh/forecasting/prompt.hpp"
#include "cfh/forecasting/rag_context.hpp"
#include "cfh/forecasting/reply_parser.hpp"
#include "cfh/forecasting/task.hpp"
#include "cfh/retrieval/chunk.hpp"
#include "cfh/retrieval/embed.hpp"
#include "parser_fixtures.hpp"

using namespace cfh;
using namespace cfh::forecasting;
using labeling::TrendLabel;

namespace {

ForecastTask sudan_may_2023(Experiment e = Experiment::Parametric) {
  return {{"Sudan", "SDN"}, parse_month("2023-05"), e};
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = haystack.find(needle); p != std::string::npos; p = haystack.find(needle, p + 1)) ++n;
  return n;
}

ingestion::GdeltEvent event(const char* date, const char* actor, double tone, double goldstein, const char* url) {
  ingestion::GdeltEvent e;
  e.event_date = parse_date(date);
  e.actor1_country = actor;
  e.avg_tone = tone;
  e.goldstein = goldstein;
  e.source_url = url;
  return e;
}

ingestion::Article article(const char* url, const std::string& body, std::vector<Date> origin) {
  return {url, "2024-01-01T00:00:00Z", "t", body, std::move(origin)};
}

struct Fixture {
  ingestion::Corpus corpus;
  std::vector<retrieval::Chunk> chunk_list;
  std::unordered_map<std::string, retrieval::Chunk> chunks;
  retrieval::HashingEmbedder embedder;
  retrieval::FlatIndex index{256};

  Fixture() {
    corpus.gdelt = {event("2023-02-10", "SDN", -2.0, -5.0, "https://news.example/a"),
                    event("2023-04-02", "SDN", -4.0, -5.5, "https://news.example/b"),
                    event("2023-05-03", "SDN", -9.0, -10.0, "https://news.example/future"),
                    event("2023-03-03", "ETH", 5.0, 5.0, "https://news.example/eth")};
    corpus.acled = {{parse_date("2023-04-30"), "Sudan", 7},
                    {parse_date("2023-05-02"), "Sudan", 100},
                    {parse_date("2023-04-29"), "Ethiopia", 50}};
    corpus.articles = {
        article("https://news.example/a", "Fighting in Khartoum displaced thousands. The army shelled the market.",
                {parse_date("2023-02-10")}),
        article("https://news.example/b", "Armed clashes escalated near El Fasher. Violence spread to the road.",
                {parse_date("2023-04-02")}),
        article("https://news.example/eth", "Talks in Addis Ababa continued. Aid convoys moved.",
                {parse_date("2023-03-03")}),
        article("https://news.example/future", "Report reference MC-999. Violence in Sudan escalated in May.",
                {parse_date("2023-05-03")}),
    };
    chunk_list = retrieval::chunk_articles(corpus.articles);
    for (const auto& c : chunk_list) {
      chunks.emplace(c.id(), c);
      index.add(c.id(), embedder.embed(c.text));
    }
  }

  RetrievalStore store() const { return {corpus, index, chunks}; }
};

}  // namespace

TEST(Task, GridAndCutoff) {
  const auto months = target_months(parse_month("2020-01"), parse_month("2024-12"));
  ASSERT_EQ(months.size(), 59u);
  EXPECT_EQ(format_month(months.front()), "2020-02");
  EXPECT_EQ(format_month(months.back()), "2024-12");
  const auto grid = task_grid({{"Sudan", "SDN"}, {"Iran", "IRN"}}, parse_month("2020-01"), parse_month("2024-12"),
                              {Experiment::Parametric, Experiment::Rag});
  EXPECT_EQ(grid.size(), 4u * 59u);
  std::set<std::string> keys;
  for (const auto& t : grid) {
    EXPECT_LT(t.as_of(), first_day(t.target_month));
    EXPECT_EQ(add_days(t.as_of(), 1), first_day(t.target_month));
    keys.insert(t.key());
  }
  EXPECT_EQ(keys.size(), grid.size());

  const auto t = sudan_may_2023();
  EXPECT_EQ(format_date(t.as_of()), "2023-04-30");
  EXPECT_EQ(format_date(t.context_window().start), "2023-02-01");
  EXPECT_EQ(t.key(), "Sudan/2023-05/Parametric");
  EXPECT_EQ(task_from_json(to_json(t)).key(), t.key());
  EXPECT_EQ(lookup_iso3("Sudan"), "SDN");
  EXPECT_FALSE(lookup_iso3("Atlantis"));
}

TEST(Context, WeeklyWindowEndsOnSundayBeforeCutoff) {
  for (Date d = parse_date("2019-12-01"); d <= parse_date("2021-03-01"); d = add_days(d, 1)) {
    const auto w = weekly_window(d);
    EXPECT_EQ((to_days(w.end) - to_days(w.start)).count(), 83);
    EXPECT_EQ(std::chrono::weekday{to_days(w.end)}, std::chrono::Sunday);
    EXPECT_EQ(std::chrono::weekday{to_days(w.start)}, std::chrono::Monday);
    EXPECT_LE(w.end, d);
    EXPECT_GT(add_days(w.end, 7), d);
  }
}

TEST(Context, ArticleEligibility) {
  const DateWindow w{parse_date("2023-02-01"), parse_date("2023-04-30")};
  EXPECT_TRUE(article_in_window(article("u", "", {parse_date("2023-03-01")}), w));
  EXPECT_FALSE(article_in_window(article("u", "", {}), w));
  EXPECT_FALSE(article_in_window(article("u", "", {parse_date("2023-01-31")}), w));
  EXPECT_FALSE(article_in_window(article("u", "", {parse_date("2023-03-01"), parse_date("2023-05-01")}), w));
  EXPECT_TRUE(article_in_window(article("u", "", {parse_date("2022-12-01"), parse_date("2023-04-30")}), w));
}

TEST(Context, BuildsFromWindowOnly) {
  Fixture f;
  const auto task = sudan_may_2023(Experiment::Rag);
  const auto ctx = build_rag_context(task, f.store(), f.embedder, nullptr);
  EXPECT_FALSE(ctx.empty_context);
  EXPECT_EQ(ctx.indicator_source, IndicatorSource::RetrievedArticles);
  EXPECT_DOUBLE_EQ(ctx.avg_tone, -3.0);
  EXPECT_DOUBLE_EQ(ctx.avg_goldstein, -5.25);
  std::array<std::int64_t, kWeeklyWindow> expected{};
  expected.back() = 7;
  EXPECT_EQ(ctx.weekly_fatalities, expected);
  EXPECT_EQ(format_date(ctx.weekly_end), "2023-04-30");
  ASSERT_FALSE(ctx.retrieved.empty());
  for (const auto& hit : ctx.retrieved) {
    const auto url = doc_url_of(hit.id);
    EXPECT_TRUE(url == "https://news.example/a" || url == "https://news.example/b") << url;
  }
  EXPECT_EQ(ctx.summary.text.find("MC-999"), std::string::npos);
  EXPECT_FALSE(ctx.summary.text.empty());

  const auto prompt = render_prompt_rag(task, ctx);
  EXPECT_NE(prompt.find("-3.00"), std::string::npos);
  EXPECT_NE(prompt.find("-5.25"), std::string::npos);
  EXPECT_NE(prompt.find("0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 7"), std::string::npos);
  EXPECT_EQ(prompt.find("MC-999"), std::string::npos);

  EXPECT_THROW(build_rag_context(sudan_may_2023(), f.store(), f.embedder, nullptr), Error);
}

TEST(Context, EmptyWindowIsFlagged) {
  Fixture f;
  const ForecastTask task{{"Somalia", "SOM"}, parse_month("2023-05"), Experiment::Rag};
  const auto ctx = build_rag_context(task, f.store(), f.embedder, nullptr);
  EXPECT_TRUE(ctx.empty_context);
  EXPECT_EQ(ctx.indicator_source, IndicatorSource::None);
  EXPECT_TRUE(ctx.summary.text.empty());
  EXPECT_EQ(ctx.weekly_fatalities, (std::array<std::int64_t, kWeeklyWindow>{}));
  const auto prompt = render_prompt_rag(task, ctx);
  EXPECT_NE(prompt.find("0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0"), std::string::npos);
  EXPECT_NE(prompt.find("0.00"), std::string::npos);
  EXPECT_NE(prompt.find("(no relevant news excerpts were found)"), std::string::npos);
}

TEST(Context, QueryNamesCountryAndWindow) {
  EXPECT_EQ(retrieval_query(sudan_may_2023(Experiment::Rag)),
            "armed conflict violence escalation Sudan February 2023 - April 2023");
}

TEST(Prompt, ParametricContents) {
  const auto p = render_prompt_parametric(sudan_may_2023());
  EXPECT_NE(p.find("Sudan"), std::string::npos);
  EXPECT_NE(p.find("May 2023"), std::string::npos);
  for (const char* label : {"Escalate", "De-escalate", "Peace/No Conflict", "Stable Conflict"})
    EXPECT_NE(p.find(label), std::string::npos) << label;
  EXPECT_NE(p.find("TREND:"), std::string::npos);
  EXPECT_NE(p.find("FATALITIES:"), std::string::npos);
  EXPECT_EQ(p, render_prompt_parametric(sudan_may_2023()));
  EXPECT_EQ(p.find('{'), std::string::npos);
}

TEST(Prompt, RagIndicatorsAndTemplates) {
  RagContext ctx;
  ctx.avg_tone = -3.14159;
  ctx.avg_goldstein = -5.25;
  ctx.summary.text = "Fighting continued.";
  const auto task = sudan_may_2023(Experiment::Rag);
  const auto p = render_prompt_rag(task, ctx);
  EXPECT_NE(p.find("-3.14"), std::string::npos);
  EXPECT_NE(p.find("-5.25"), std::string::npos);
  EXPECT_NE(p.find("Fighting continued."), std::string::npos);
  EXPECT_EQ(count_of(p, "0, "), 11u);
  EXPECT_EQ(p, render_prompt_rag(task, ctx));

  EXPECT_EQ(format_fixed2(-0.001), "0.00");
  EXPECT_EQ(format_fixed2(2.005), "2.00");  // binary 2.005 sits just below the midpoint

  try {
    render_prompt_rag(task, ctx, "{country} {target_month} {label_set} {summary}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TemplateMissingPlaceholder);
  }
  const auto custom = render_prompt_parametric(task, "Predict {country} in {target_month}: {label_set}.");
  EXPECT_NE(custom.find("TREND: <one of"), std::string::npos);
  // Substituted text is not rescanned.
  RagContext tricky;
  tricky.summary.text = "{country}";
  EXPECT_NE(render_prompt_rag(task, tricky).find("{country}"), std::string::npos);
}

TEST(Parser, DocumentedExamples) {
  auto a = parse_forecast("TREND: Stable Conflict\nFATALITIES: 300-500");
  EXPECT_EQ(a.label, TrendLabel::StableConflict);
  EXPECT_DOUBLE_EQ(a.fatalities_point, 400);
  EXPECT_EQ(a.fatalities_range, (std::pair<double, double>{300, 500}));

  auto b = parse_forecast("TREND: Peace/No Conflict\nFATALITIES: 0");
  EXPECT_EQ(b.label, TrendLabel::Peace);
  EXPECT_DOUBLE_EQ(b.fatalities_point, 0);
  EXPECT_FALSE(b.fatalities_range);

  auto c = parse_forecast("I expect escalation in the coming weeks. FATALITIES: 1,200");
  EXPECT_EQ(c.label, TrendLabel::Escalate);
  EXPECT_DOUBLE_EQ(c.fatalities_point, 1200);
}

TEST(Parser, FixtureSuite) {
  const auto cases = fixtures::parser_cases();
  ASSERT_GE(cases.size(), 30u);
  for (const auto& tc : cases) {
    SCOPED_TRACE(tc.reply);
    const auto out = parse_forecast(tc.reply);
    EXPECT_EQ(out.label, tc.label);
    EXPECT_DOUBLE_EQ(out.fatalities_point, tc.point);
    EXPECT_EQ(out.fatalities_range, tc.range);
    EXPECT_EQ(out.raw_text, tc.reply);
  }
  for (const auto& tc : fixtures::unparseable_cases()) {
    SCOPED_TRACE(tc.reply);
    try {
      parse_forecast(tc.reply);
      ADD_FAILURE() << "parsed";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), tc.expected);
    }
  }
}

TEST(Parser, RangeMidpointAndRoundTrip) {
  std::mt19937 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const int lo = static_cast<int>(rng() % 100000);
    const int hi = lo + static_cast<int>(rng() % 100000);
    const auto label = labeling::kAllLabels[rng() % 4];
    const std::string reply = "TREND: " + std::string(labeling::display_name(label)) + "\nFATALITIES: " +
                              std::to_string(lo) + "-" + std::to_string(hi);
    const auto out = parse_forecast(reply);
    EXPECT_EQ(out.label, label);
    ASSERT_TRUE(out.fatalities_range);
    EXPECT_LE(out.fatalities_range->first, out.fatalities_point);
    EXPECT_LE(out.fatalities_point, out.fatalities_range->second);
    EXPECT_DOUBLE_EQ(out.fatalities_point, (lo + hi) / 2.0);
    EXPECT_EQ(forecast_from_json(nlohmann::json::parse(to_json(out).dump())), out);
  }
}

TEST(Parser, NumberForms) {
  EXPECT_DOUBLE_EQ(parse_forecast("Escalate: 12,345 deaths").fatalities_point, 12345);
  EXPECT_DOUBLE_EQ(parse_forecast("Escalate: 12,34 deaths").fatalities_point, 12);
  EXPECT_DOUBLE_EQ(parse_forecast("Escalate: 3.75").fatalities_point, 3.75);
  // Digits glued to letters are not quantities.
  EXPECT_DOUBLE_EQ(parse_forecast("Escalate in Q2 with 40 deaths").fatalities_point, 40);
}
