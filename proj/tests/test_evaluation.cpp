#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "cfh/evaluation/report.hpp"
#include "metric_oracle.hpp"

using namespace cfh;
using namespace cfh::evaluation;
using labeling::TrendLabel;

namespace {

PredictionRecord record(TrendLabel truth, TrendLabel predicted, std::int64_t truth_fat = 0, double pred_fat = 0,
                        const std::string& country = "Sudan", const char* month = "2023-05") {
  PredictionRecord r;
  r.task = {{country, ""}, parse_month(month), forecasting::Experiment::Parametric};
  r.model_id = "m";
  r.truth_label = truth;
  r.truth_fatalities = truth_fat;
  forecasting::ForecastOutput out;
  out.label = predicted;
  out.fatalities_point = pred_fat;
  r.predicted = out;
  return r;
}

PredictionRecord failed_record() {
  PredictionRecord r = record(TrendLabel::Peace, TrendLabel::Peace);
  r.predicted.reset();
  r.parse_failed = true;
  r.error = "MissingLabel";
  return r;
}

}  // namespace

TEST(Metrics, MatchesBruteForceOracle) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 80;
    std::vector<PredictionRecord> records;
    std::vector<std::size_t> truth, pred;
    const bool skewed = trial % 3 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t t = skewed ? rng() % 2 : rng() % 4;
      const std::size_t p = rng() % 4;
      truth.push_back(t);
      pred.push_back(p);
      records.push_back(record(labeling::kAllLabels[t], labeling::kAllLabels[p]));
    }
    const auto m = confusion(records, categorical_pair);
    EXPECT_EQ(m.total(), static_cast<std::int64_t>(n));
    const auto oracle = fixtures::oracle_metrics(truth, pred, 4);
    for (auto avg : {Averaging::Micro, Averaging::Macro, Averaging::Weighted}) {
      const auto got = classification_metrics(m, avg);
      const auto& want = oracle.at(avg);
      EXPECT_NEAR(got.precision, want.precision, 1e-9) << to_string(avg);
      EXPECT_NEAR(got.recall, want.recall, 1e-9) << to_string(avg);
      EXPECT_NEAR(got.f1, want.f1, 1e-9) << to_string(avg);
    }
    EXPECT_EQ(classification_metrics(m, Averaging::Micro).f1, accuracy(m));
    EXPECT_NEAR(accuracy(m), fixtures::oracle_accuracy(truth, pred), 1e-12);

    for (std::size_t c = 0; c < 4; ++c) {
      std::int64_t row = 0, col = 0;
      for (std::size_t i = 0; i < n; ++i) {
        row += truth[i] == c;
        col += pred[i] == c;
      }
      EXPECT_EQ(m.row_sum(c), row);
      EXPECT_EQ(m.col_sum(c), col);
    }

    auto shuffled = records;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(confusion(shuffled, categorical_pair).counts, m.counts);
  }
}

TEST(Metrics, PerfectAndAbsentClasses) {
  std::vector<PredictionRecord> records = {record(TrendLabel::Escalate, TrendLabel::Escalate),
                                           record(TrendLabel::StableConflict, TrendLabel::StableConflict)};
  const auto b = block_metrics(confusion(records, categorical_pair));
  EXPECT_EQ(b.accuracy, 1.0);
  EXPECT_EQ(b.micro.f1, 1.0);
  EXPECT_EQ(b.weighted.f1, 1.0);
  // Two of the four classes never occur and contribute zero to the macro mean.
  EXPECT_DOUBLE_EQ(b.macro.f1, 0.5);
}

TEST(Metrics, MaeAndScorability) {
  std::vector<PredictionRecord> records = {record(TrendLabel::Peace, TrendLabel::Peace, 100, 150),
                                           record(TrendLabel::Peace, TrendLabel::Peace, 200, 150), failed_record()};
  EXPECT_DOUBLE_EQ(mae(records), 50.0);
  EXPECT_EQ(confusion(records, categorical_pair).total(), 2);

  try {
    confusion({failed_record()}, categorical_pair);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoScorableRecords);
  }
  EXPECT_THROW(mae({}), Error);
  ConfusionMatrix m(trend_class_names());
  EXPECT_THROW(m.add(4, 0), Error);
}

TEST(Evaluate, AllBlocksAndCounts) {
  labeling::LabelingConfig cfg;
  auto r1 = record(TrendLabel::StableConflict, TrendLabel::Escalate, 400, 400, "Sudan", "2023-05");
  auto r2 = record(TrendLabel::Escalate, TrendLabel::Escalate, 900, 1000, "Sudan", "2023-06");
  auto r3 = failed_record();
  r3.empty_context = true;
  std::vector<PredictionRecord> records = {r1, r2, r3};
  std::map<std::string, labeling::QuantileBins> bins = {
      {"Sudan", labeling::compute_quantile_bins({100, 200, 300, 400, 500, 600, 700, 800}, 4)}};
  const TrailingLookup trailing = [](const PredictionRecord& r) -> std::optional<std::vector<std::int64_t>> {
    if (format_month(r.task.target_month) == "2023-05") return std::vector<std::int64_t>{380, 400, 420};
    return std::nullopt;
  };
  const auto rep = evaluate_all(records, bins, cfg, trailing);
  EXPECT_EQ(rep.n_input, 3u);
  EXPECT_EQ(rep.n_scored, 2u);
  EXPECT_EQ(rep.n_failed, 1u);
  EXPECT_EQ(rep.n_empty_context, 1u);
  EXPECT_DOUBLE_EQ(rep.parse_failure_rate(), 1.0 / 3.0);
  ASSERT_TRUE(rep.categorical);
  EXPECT_DOUBLE_EQ(rep.categorical->accuracy, 0.5);
  // 400 against a flat 400 trailing window is Stable Conflict, matching truth.
  ASSERT_TRUE(rep.from_fatalities);
  EXPECT_EQ(rep.from_fatalities->n, 1);
  EXPECT_DOUBLE_EQ(rep.from_fatalities->accuracy, 1.0);
  ASSERT_TRUE(rep.binned);
  EXPECT_EQ(rep.binned->n, 2);
  EXPECT_DOUBLE_EQ(*rep.mae, 50.0);

  const auto none = evaluate_all({failed_record()}, {}, cfg, trailing);
  EXPECT_FALSE(none.categorical);
  EXPECT_FALSE(none.binned);
  EXPECT_FALSE(none.mae);
}

TEST(Report, LayoutAndFormatsAgree) {
  std::map<ReportKey, MetricsReport> reports;
  MetricsReport full;
  full.categorical = block_metrics(confusion({record(TrendLabel::Peace, TrendLabel::Peace)}, categorical_pair));
  full.mae = 12.3456;
  full.n_input = 1;
  full.n_scored = 1;
  MetricsReport empty;
  empty.n_input = 2;
  empty.n_failed = 2;
  reports[{"gpt-4", forecasting::Experiment::Parametric, "Sudan"}] = full;
  reports[{"gpt-4", forecasting::Experiment::Rag, "Sudan"}] = empty;
  reports[{"gpt-4", forecasting::Experiment::Parametric, "Ethiopia"}] = empty;

  const auto table = build_report_table(reports, {"Sudan", "Ethiopia"});
  EXPECT_EQ(table.countries, (std::vector<std::string>{"Sudan", "Ethiopia"}));
  std::vector<std::string> groups;
  for (const auto& row : table.rows)
    if (groups.empty() || groups.back() != row.group) groups.push_back(row.group);
  EXPECT_EQ(groups, (std::vector<std::string>{
                        "Exp 1: Class (Categorical)", "Exp 2: Class (Categorical)", "Exp 1: Class (From Fatalities)",
                        "Exp 2: Class (From Fatalities)", "Exp 1: MAE", "Exp 2: MAE", "Exp 1: Binned Regression",
                        "Exp 2: Binned Regression", "Exp 1: Counts", "Exp 2: Counts"}));

  auto cell = [&](const std::string& group, const std::string& metric, std::size_t col) {
    for (const auto& row : table.rows)
      if (row.group == group && row.metric == metric) return row.cells.at(col);
    return std::string("missing");
  };
  EXPECT_EQ(cell("Exp 1: Class (Categorical)", "Accuracy", 0), "1.0000");
  EXPECT_EQ(cell("Exp 1: Class (Categorical)", "Accuracy", 1), "n/a");
  EXPECT_EQ(cell("Exp 2: Class (Categorical)", "F1 (macro)", 0), "n/a");
  EXPECT_EQ(cell("Exp 1: MAE", "Fatalities MAE", 0), "12.35");
  EXPECT_EQ(cell("Exp 2: Counts", "Failed", 0), "2");
  EXPECT_EQ(cell("Exp 2: Counts", "Failed", 1), "n/a");

  // Every CSV cell appears verbatim in the matching Markdown row.
  const auto csv = render_report(reports, ReportFormat::Csv, {"Sudan", "Ethiopia"});
  const auto md = render_report(reports, ReportFormat::Markdown, {"Sudan", "Ethiopia"});
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "model,experiment,metric,Sudan,Ethiopia");
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto& row = table.rows.at(n++);
    EXPECT_EQ(line, row.model_id + "," + row.group + "," + row.metric + "," + row.cells[0] + "," + row.cells[1]);
    EXPECT_NE(md.find("| " + row.metric + " | " + row.cells[0] + " | " + row.cells[1] + " |"), std::string::npos)
        << row.metric;
  }
  EXPECT_EQ(n, table.rows.size());
  EXPECT_EQ(md.rfind("## gpt-4\n", 0), 0u);
  EXPECT_THROW(render_report({}, ReportFormat::Csv), Error);
  EXPECT_EQ(format_fixed(-0.00001, 4), "0.0000");
}
