#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfh/evaluation/records.hpp"

namespace cfh::evaluation {

/// Rows are truth, columns are predictions.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::int64_t>> counts;

  explicit ConfusionMatrix(std::vector<std::string> names = {})
      : classes(std::move(names)), counts(classes.size(), std::vector<std::int64_t>(classes.size(), 0)) {}

  std::size_t size() const { return classes.size(); }

  void add(std::size_t truth, std::size_t predicted) {
    if (truth >= size() || predicted >= size())
      throw Error(ErrorKind::InvalidArgument, "class index outside the confusion matrix");
    ++counts[truth][predicted];
  }

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
      for (auto c : row) t += c;
    return t;
  }

  std::int64_t trace() const {
    std::int64_t t = 0;
    for (std::size_t i = 0; i < size(); ++i) t += counts[i][i];
    return t;
  }

  std::int64_t row_sum(std::size_t i) const {
    std::int64_t t = 0;
    for (auto c : counts[i]) t += c;
    return t;
  }

  std::int64_t col_sum(std::size_t j) const {
    std::int64_t t = 0;
    for (const auto& row : counts) t += row[j];
    return t;
  }
};

inline std::vector<std::string> trend_class_names() {
  std::vector<std::string> out;
  for (auto l : labeling::kAllLabels) out.emplace_back(labeling::display_name(l));
  return out;
}

inline std::vector<std::string> bin_class_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("bin " + std::to_string(i));
  return out;
}

/// Maps a record to (truth class, predicted class), or nullopt to leave it out.
using LabelExtractor = std::function<std::optional<std::pair<std::size_t, std::size_t>>(const PredictionRecord&)>;

inline ConfusionMatrix confusion(const std::vector<PredictionRecord>& records, const LabelExtractor& extractor,
                                 std::vector<std::string> classes = trend_class_names()) {
  ConfusionMatrix m(std::move(classes));
  for (const auto& r : records) {
    if (!r.scorable()) continue;
    if (auto pair = extractor(r)) m.add(pair->first, pair->second);
  }
  if (m.total() == 0) throw Error(ErrorKind::NoScorableRecords, "no scorable records");
  return m;
}

inline std::optional<std::pair<std::size_t, std::size_t>> categorical_pair(const PredictionRecord& r) {
  return std::pair{labeling::label_index(r.truth_label), labeling::label_index(r.predicted->label)};
}

enum class Averaging { Micro, Macro, Weighted };

inline std::string_view to_string(Averaging a) {
  switch (a) {
    case Averaging::Micro: return "micro";
    case Averaging::Macro: return "macro";
    case Averaging::Weighted: return "weighted";
  }
  return "";
}

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

inline double safe_ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

inline double accuracy(const ConfusionMatrix& m) {
  return safe_ratio(static_cast<double>(m.trace()), static_cast<double>(m.total()));
}

inline Prf per_class(const ConfusionMatrix& m, std::size_t c) {
  const auto tp = static_cast<double>(m.counts[c][c]);
  Prf r;
  r.precision = safe_ratio(tp, static_cast<double>(m.col_sum(c)));
  r.recall = safe_ratio(tp, static_cast<double>(m.row_sum(c)));
  r.f1 = safe_ratio(2 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

inline Prf classification_metrics(const ConfusionMatrix& m, Averaging averaging) {
  if (m.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty confusion matrix");
  Prf out;
  if (averaging == Averaging::Micro) {
    // Pooled counts; in single-label classification FP and FN both equal the
    // off-diagonal mass, and 2TP/(2TP+FP+FN) reduces to trace/total exactly.
    const auto tp = static_cast<double>(m.trace());
    const auto off = static_cast<double>(m.total() - m.trace());
    out.precision = safe_ratio(tp, tp + off);
    out.recall = safe_ratio(tp, tp + off);
    out.f1 = safe_ratio(2 * tp, 2 * tp + off + off);
    return out;
  }
  const auto total = static_cast<double>(m.total());
  for (std::size_t c = 0; c < m.size(); ++c) {
    const auto pc = per_class(m, c);
    const double w = averaging == Averaging::Macro ? 1.0 / static_cast<double>(m.size())
                                                   : safe_ratio(static_cast<double>(m.row_sum(c)), total);
    out.precision += w * pc.precision;
    out.recall += w * pc.recall;
    out.f1 += w * pc.f1;
  }
  return out;
}

struct BlockMetrics {
  std::int64_t n = 0;
  double accuracy = 0;
  Prf micro, macro, weighted;
};

inline BlockMetrics block_metrics(const ConfusionMatrix& m) {
  return {m.total(), accuracy(m), classification_metrics(m, Averaging::Micro),
          classification_metrics(m, Averaging::Macro), classification_metrics(m, Averaging::Weighted)};
}

inline double mae(const std::vector<PredictionRecord>& records) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (!r.scorable()) continue;
    sum += std::abs(r.predicted->fatalities_point - static_cast<double>(r.truth_fatalities));
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::NoScorableRecords, "no scorable records");
  return sum / static_cast<double>(n);
}

}  // namespace cfh::evaluation
