#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfh/forecasting/reply_parser.hpp"
#include "cfh/forecasting/task.hpp"
#include "cfh/io.hpp"
#include "cfh/labeling/trend.hpp"

namespace cfh::evaluation {

using forecasting::ForecastOutput;
using forecasting::ForecastTask;
using labeling::TrendLabel;

/// Ground truth for one (country, target month), produced by make-labels.
struct LabelRecord {
  std::string country;
  Month target_month;
  TrendLabel truth_label = TrendLabel::Peace;
  std::int64_t truth_fatalities = 0;
  std::size_t truth_bin = 0;
  std::vector<std::int64_t> trailing;  // monthly sums of the months before the target, oldest first

  std::string key() const { return country + "/" + format_month(target_month); }
};

struct PredictionRecord {
  ForecastTask task;
  std::string model_id;
  TrendLabel truth_label = TrendLabel::Peace;
  std::int64_t truth_fatalities = 0;
  std::optional<ForecastOutput> predicted;
  bool parse_failed = false;
  std::string error;  // error kind when no prediction was obtained
  bool empty_context = false;

  bool scorable() const { return !parse_failed && predicted.has_value(); }
};

inline nlohmann::json to_json(const LabelRecord& r) {
  return {{"country", r.country},
          {"target_month", format_month(r.target_month)},
          {"truth_label", labeling::key_name(r.truth_label)},
          {"truth_fatalities", r.truth_fatalities},
          {"truth_bin", r.truth_bin},
          {"trailing", r.trailing}};
}

inline LabelRecord label_from_json(const nlohmann::json& j) {
  LabelRecord r;
  r.country = j.at("country").get<std::string>();
  r.target_month = parse_month(j.at("target_month").get<std::string>());
  r.truth_label = labeling::label_from_key(j.at("truth_label").get<std::string>());
  r.truth_fatalities = j.at("truth_fatalities").get<std::int64_t>();
  r.truth_bin = j.at("truth_bin").get<std::size_t>();
  r.trailing = j.at("trailing").get<std::vector<std::int64_t>>();
  return r;
}

inline nlohmann::json to_json(const PredictionRecord& r) {
  nlohmann::json j = {{"task", forecasting::to_json(r.task)},
                      {"model_id", r.model_id},
                      {"truth_label", labeling::key_name(r.truth_label)},
                      {"truth_fatalities", r.truth_fatalities},
                      {"predicted", nullptr},
                      {"parse_failed", r.parse_failed},
                      {"error", r.error},
                      {"empty_context", r.empty_context}};
  if (r.predicted && !r.parse_failed) j["predicted"] = forecasting::to_json(*r.predicted);
  return j;
}

inline PredictionRecord prediction_from_json(const nlohmann::json& j) {
  PredictionRecord r;
  r.task = forecasting::task_from_json(j.at("task"));
  r.model_id = j.at("model_id").get<std::string>();
  r.truth_label = labeling::label_from_key(j.at("truth_label").get<std::string>());
  r.truth_fatalities = j.at("truth_fatalities").get<std::int64_t>();
  r.parse_failed = j.at("parse_failed").get<bool>();
  if (!r.parse_failed && j.contains("predicted") && !j.at("predicted").is_null())
    r.predicted = forecasting::forecast_from_json(j.at("predicted"));
  r.error = j.value("error", "");
  r.empty_context = j.value("empty_context", false);
  return r;
}

inline std::vector<LabelRecord> read_labels(const std::filesystem::path& path) {
  std::vector<LabelRecord> out;
  for (const auto& row : io::read_jsonl(path)) out.push_back(label_from_json(row));
  return out;
}

inline std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  std::vector<PredictionRecord> out;
  for (const auto& row : io::read_jsonl(path)) out.push_back(prediction_from_json(row));
  return out;
}

inline std::map<std::string, LabelRecord> index_labels(const std::vector<LabelRecord>& labels) {
  std::map<std::string, LabelRecord> out;
  for (const auto& l : labels) out.emplace(l.key(), l);
  return out;
}

}  // namespace cfh::evaluation
