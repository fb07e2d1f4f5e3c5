#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfh/error.hpp"
#include "cfh/labeling/trend.hpp"

namespace cfh::fixtures {

struct ParserCase {
  std::string reply;
  labeling::TrendLabel label;
  double point;
  std::optional<std::pair<double, double>> range;
};

inline std::vector<ParserCase> parser_cases() {
  using L = labeling::TrendLabel;
  using R = std::pair<double, double>;
  return {
      {"TREND: Stable Conflict\nFATALITIES: 300-500", L::StableConflict, 400, R{300, 500}},
      {"TREND: Peace/No Conflict\nFATALITIES: 0", L::Peace, 0, std::nullopt},
      {"I expect escalation in the coming weeks. FATALITIES: 1,200", L::Escalate, 1200, std::nullopt},
      {"TREND: Escalate\nFATALITIES: 1,200 to 1,500", L::Escalate, 1350, R{1200, 1500}},
      {"TREND: De-escalate\nFATALITIES: 150-250", L::DeEscalate, 200, R{150, 250}},
      {"trend: de-escalate\nfatalities: 40", L::DeEscalate, 40, std::nullopt},
      {"TREND: Deescalate\nFATALITIES: 12", L::DeEscalate, 12, std::nullopt},
      {"TREND: de escalation\nFATALITIES: 90", L::DeEscalate, 90, std::nullopt},
      {"TREND: ESCALATE\nFATALITIES: 2,345,678", L::Escalate, 2345678, std::nullopt},
      {"TREND: Stable\nFATALITIES: 12.5", L::StableConflict, 12.5, std::nullopt},
      {"TREND: No Conflict\nFATALITIES: 0-10", L::Peace, 5, R{0, 10}},
      {"TREND: Peace\nFATALITIES: 3", L::Peace, 3, std::nullopt},
      {"TREND: Stable Conflict\nFATALITIES: 100 - 200", L::StableConflict, 150, R{100, 200}},
      {"TREND: Stable Conflict\nFATALITIES: 100\xE2\x80\x93" "200", L::StableConflict, 150, R{100, 200}},
      {"TREND: Escalate\nFATALITIES: 1,000\xE2\x80\x94" "2,000", L::Escalate, 1500, R{1000, 2000}},
      {"TREND: Escalate\nFATALITIES: 500 TO 700", L::Escalate, 600, R{500, 700}},
      {"TREND: Escalate\nFATALITIES: between 800 to 1,000 deaths", L::Escalate, 900, R{800, 1000}},
      {"TREND: Stable Conflict\nFATALITIES: approximately 350 (range 300-400)", L::StableConflict, 350,
       std::nullopt},
      {"  TREND:   Escalate  \r\n  FATALITIES:   75  \r\n", L::Escalate, 75, std::nullopt},
      {"Forecast for Sudan, May 2023\nTREND: Escalate\nFATALITIES: 1400", L::Escalate, 1400, std::nullopt},
      {"FATALITIES: 60\nTREND: De-escalate", L::DeEscalate, 60, std::nullopt},
      {"**TREND:** Stable Conflict\n**FATALITIES:** 420", L::StableConflict, 420, std::nullopt},
      {"TREND: Escalate (fighting spreads to new districts)\nFATALITIES: 2000", L::Escalate, 2000, std::nullopt},
      {"The situation will likely remain stable with around 250 deaths.", L::StableConflict, 250, std::nullopt},
      {"We anticipate de-escalation; roughly 30-50 fatalities.", L::DeEscalate, 40, R{30, 50}},
      {"Peace is expected to hold, with 0 deaths.", L::Peace, 0, std::nullopt},
      {"Escalation likely. Estimated deaths: 1,500 to 2,500.", L::Escalate, 2000, R{1500, 2500}},
      {"TREND: Stable Conflict\nFATALITIES: 400", L::StableConflict, 400, std::nullopt},
      {"TREND: Escalate\nFATALITIES: n/a\nBest guess 900 deaths.", L::Escalate, 900, std::nullopt},
      {"TREND: Stable Conflict\nFATALITIES: 500-300", L::StableConflict, 500, std::nullopt},
      {"Trend: Peace/No Conflict.\nFatalities: 5 to 15", L::Peace, 10, R{5, 15}},
      {"TREND: Peace/No Conflict\nFATALITIES: 0\nTREND: Peace", L::Peace, 0, std::nullopt},
  };
}

struct UnparseableCase {
  std::string reply;
  ErrorKind expected;
};

inline std::vector<UnparseableCase> unparseable_cases() {
  return {
      {"", ErrorKind::MissingLabel},
      {"I cannot help with that request.", ErrorKind::MissingLabel},
      {"FATALITIES: 300", ErrorKind::MissingLabel},
      {"TREND: unclear\nFATALITIES: 300", ErrorKind::MissingLabel},
      {"TREND: Escalate\nFATALITIES: unknown", ErrorKind::MissingFatalities},
      {"The conflict will remain stable.", ErrorKind::MissingFatalities},
      {"TREND: Escalate\nTREND: De-escalate\nFATALITIES: 10", ErrorKind::AmbiguousLabel},
  };
}

}  // namespace cfh::fixtures
