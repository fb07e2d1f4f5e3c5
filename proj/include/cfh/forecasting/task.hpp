#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfh/dates.hpp"
#include "cfh/error.hpp"
#include "cfh/text.hpp"

namespace cfh::forecasting {

enum class Experiment { Parametric, Rag };

inline std::string_view to_string(Experiment e) { return e == Experiment::Parametric ? "Parametric" : "Rag"; }

inline Experiment experiment_from_string(std::string_view s) {
  if (s == "Parametric") return Experiment::Parametric;
  if (s == "Rag") return Experiment::Rag;
  throw Error(ErrorKind::InvalidArgument, "unknown experiment '" + std::string(s) + "'");
}

/// "Exp 1" / "Exp 2" as used in report row groups.
inline std::string_view experiment_tag(Experiment e) { return e == Experiment::Parametric ? "Exp 1" : "Exp 2"; }

struct Country {
  std::string name;  // ACLED country name
  std::string iso3;  // GDELT actor country code
};

/// Codes for the default study countries and their neighbours. Other countries
/// must be configured with an explicit code.
inline std::optional<std::string> lookup_iso3(std::string_view name) {
  static const std::vector<std::pair<std::string, std::string>> kKnown = {
      {"ethiopia", "ETH"}, {"sudan", "SDN"},    {"south sudan", "SSD"}, {"somalia", "SOM"}, {"israel", "ISR"},
      {"iran", "IRN"},     {"eritrea", "ERI"},  {"djibouti", "DJI"},    {"kenya", "KEN"},   {"yemen", "YEM"},
      {"syria", "SYR"},    {"iraq", "IRQ"},     {"lebanon", "LBN"},     {"jordan", "JOR"},  {"egypt", "EGY"},
      {"palestine", "PSE"}, {"saudi arabia", "SAU"}, {"uganda", "UGA"}, {"chad", "TCD"},    {"libya", "LBY"}};
  const auto key = text::fold_key(name);
  for (const auto& [n, code] : kKnown)
    if (n == key) return code;
  return std::nullopt;
}

struct ForecastTask {
  Country country;
  Month target_month;
  Experiment experiment = Experiment::Parametric;

  /// Last day of the month before the target; nothing later may be used.
  Date as_of() const { return last_day(add_months(target_month, -1)); }

  /// Context window: the `months` calendar months before the target.
  DateWindow context_window(int months = 3) const {
    return {first_day(add_months(target_month, -months)), as_of()};
  }

  /// Unique key used for resume: country/YYYY-MM/experiment.
  std::string key() const {
    return country.name + "/" + format_month(target_month) + "/" + std::string(to_string(experiment));
  }
};

/// Target months in [first, last] with at least one earlier month of history
/// inside the range, i.e. every month but the first.
inline std::vector<Month> target_months(Month first, Month last) {
  std::vector<Month> out;
  for (Month m = add_months(first, 1); m <= last; m = add_months(m, 1)) out.push_back(m);
  return out;
}

inline std::vector<ForecastTask> task_grid(const std::vector<Country>& countries, Month first, Month last,
                                           const std::vector<Experiment>& experiments) {
  std::vector<ForecastTask> tasks;
  for (const auto& c : countries)
    for (auto e : experiments)
      for (auto m : target_months(first, last)) tasks.push_back({c, m, e});
  return tasks;
}

inline nlohmann::json to_json(const ForecastTask& t) {
  return {{"country", t.country.name},
          {"iso3", t.country.iso3},
          {"target_month", format_month(t.target_month)},
          {"as_of", format_date(t.as_of())},
          {"experiment", to_string(t.experiment)}};
}

inline ForecastTask task_from_json(const nlohmann::json& j) {
  ForecastTask t;
  t.country.name = j.at("country").get<std::string>();
  t.country.iso3 = j.value("iso3", "");
  t.target_month = parse_month(j.at("target_month").get<std::string>());
  t.experiment = experiment_from_string(j.at("experiment").get<std::string>());
  return t;
}

}  // namespace cfh::forecasting
