#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cfh/evaluation/evaluate.hpp"

namespace cfh::evaluation {

struct ReportKey {
  std::string model_id;
  forecasting::Experiment experiment = forecasting::Experiment::Parametric;
  std::string country;

  auto operator<=>(const ReportKey&) const = default;
};

enum class ReportFormat { Markdown, Csv };

/// One rendered table row. Markdown and CSV are both produced from these rows,
/// so the two formats cannot disagree on a value.
struct ReportRow {
  std::string model_id;
  std::string group;
  std::string metric;
  std::vector<std::string> cells;  // one per country, "n/a" when nothing was scorable
};

struct ReportTable {
  std::vector<std::string> countries;
  std::vector<ReportRow> rows;
};

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline constexpr std::string_view kNotAvailable = "n/a";

inline std::string_view block_title(PredictionType t) {
  switch (t) {
    case PredictionType::CategoricalClass: return "Class (Categorical)";
    case PredictionType::ClassFromFatalities: return "Class (From Fatalities)";
    case PredictionType::BinnedRegression: return "Binned Regression";
  }
  return "";
}

inline ReportTable build_report_table(const std::map<ReportKey, MetricsReport>& reports,
                                      const std::vector<std::string>& country_order = {}) {
  ReportTable table;
  std::set<std::string> models;
  std::set<forecasting::Experiment> experiments;
  std::set<std::string> seen;
  for (const auto& [key, _] : reports) {
    models.insert(key.model_id);
    experiments.insert(key.experiment);
    seen.insert(key.country);
  }
  for (const auto& c : country_order)
    if (seen.erase(c)) table.countries.push_back(c);
  for (const auto& c : seen) table.countries.push_back(c);

  using Getter = std::function<std::optional<double>(const MetricsReport&)>;
  auto add_row = [&](const std::string& model, forecasting::Experiment exp, const std::string& group,
                     const std::string& metric, const Getter& get, int decimals) {
    ReportRow row{model, std::string(forecasting::experiment_tag(exp)) + ": " + group, metric, {}};
    for (const auto& country : table.countries) {
      auto it = reports.find({model, exp, country});
      std::optional<double> v;
      if (it != reports.end()) v = get(it->second);
      row.cells.push_back(v ? format_fixed(*v, decimals) : std::string(kNotAvailable));
    }
    table.rows.push_back(std::move(row));
  };

  auto block_rows = [&](const std::string& model, forecasting::Experiment exp, PredictionType type) {
    const std::string group(block_title(type));
    auto metric = [type](auto pick) -> Getter {
      return [type, pick](const MetricsReport& r) -> std::optional<double> {
        const auto& b = r.block(type);
        if (!b) return std::nullopt;
        return pick(*b);
      };
    };
    add_row(model, exp, group, "Accuracy", metric([](const BlockMetrics& b) { return b.accuracy; }), 4);
    for (auto [avg, name] : {std::pair{Averaging::Micro, "micro"}, std::pair{Averaging::Macro, "macro"},
                             std::pair{Averaging::Weighted, "weighted"}}) {
      auto prf = [avg](const BlockMetrics& b) -> const Prf& {
        return avg == Averaging::Micro ? b.micro : avg == Averaging::Macro ? b.macro : b.weighted;
      };
      add_row(model, exp, group, std::string("Precision (") + name + ")",
              metric([prf](const BlockMetrics& b) { return prf(b).precision; }), 4);
      add_row(model, exp, group, std::string("Recall (") + name + ")",
              metric([prf](const BlockMetrics& b) { return prf(b).recall; }), 4);
      add_row(model, exp, group, std::string("F1 (") + name + ")",
              metric([prf](const BlockMetrics& b) { return prf(b).f1; }), 4);
    }
    add_row(model, exp, group, "Scored",
            metric([](const BlockMetrics& b) { return static_cast<double>(b.n); }), 0);
  };

  for (const auto& model : models) {
    for (auto type : {PredictionType::CategoricalClass, PredictionType::ClassFromFatalities}) {
      for (auto exp : experiments) block_rows(model, exp, type);
    }
    for (auto exp : experiments) {
      add_row(model, exp, "MAE", "Fatalities MAE", [](const MetricsReport& r) { return r.mae; }, 2);
    }
    for (auto exp : experiments) block_rows(model, exp, PredictionType::BinnedRegression);
    for (auto exp : experiments) {
      add_row(model, exp, "Counts", "Records",
              [](const MetricsReport& r) -> std::optional<double> { return static_cast<double>(r.n_input); }, 0);
      add_row(model, exp, "Counts", "Failed",
              [](const MetricsReport& r) -> std::optional<double> { return static_cast<double>(r.n_failed); }, 0);
      add_row(model, exp, "Counts", "Failure rate",
              [](const MetricsReport& r) -> std::optional<double> { return r.parse_failure_rate(); }, 4);
      add_row(model, exp, "Counts", "Empty context",
              [](const MetricsReport& r) -> std::optional<double> { return static_cast<double>(r.n_empty_context); },
              0);
    }
  }
  return table;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string render_markdown(const ReportTable& t) {
  std::string out;
  std::string current_model;
  bool open = false;
  auto header = [&] {
    out += "| Experiment | Metric |";
    for (const auto& c : t.countries) out += " " + c + " |";
    out += "\n|---|---|";
    for (std::size_t i = 0; i < t.countries.size(); ++i) out += "---:|";
    out += "\n";
  };
  std::string last_group;
  for (const auto& row : t.rows) {
    if (!open || row.model_id != current_model) {
      if (open) out += "\n";
      out += "## " + row.model_id + "\n\n";
      header();
      current_model = row.model_id;
      open = true;
      last_group.clear();
    }
    out += "| " + (row.group == last_group ? std::string() : row.group) + " | " + row.metric + " |";
    for (const auto& cell : row.cells) out += " " + cell + " |";
    out += "\n";
    last_group = row.group;
  }
  return out;
}

inline std::string render_csv(const ReportTable& t) {
  std::string out = "model,experiment,metric";
  for (const auto& c : t.countries) out += "," + csv_field(c);
  out += "\n";
  for (const auto& row : t.rows) {
    out += csv_field(row.model_id) + "," + csv_field(row.group) + "," + csv_field(row.metric);
    for (const auto& cell : row.cells) out += "," + cell;
    out += "\n";
  }
  return out;
}

}  // namespace detail

inline std::string render_report(const std::map<ReportKey, MetricsReport>& reports, ReportFormat format,
                                 const std::vector<std::string>& country_order = {}) {
  if (reports.empty()) throw Error(ErrorKind::InvalidArgument, "no reports to render");
  const auto table = build_report_table(reports, country_order);
  return format == ReportFormat::Markdown ? detail::render_markdown(table) : detail::render_csv(table);
}

}  // namespace cfh::evaluation
