#pragma once

#include <string_view>
#include <vector>

#include "cfh/ingestion/records.hpp"
#include "cfh/text.hpp"

namespace cfh::ingestion {

/// GDELT events in the window where either actor's country code equals `iso3`.
inline std::vector<GdeltEvent> filter_events(const std::vector<GdeltEvent>& events, std::string_view iso3,
                                             DateWindow window) {
  if (window.start > window.end) throw Error(ErrorKind::InvalidArgument, "date window start after end");
  std::vector<GdeltEvent> out;
  for (const auto& e : events) {
    if (!window.contains(e.event_date)) continue;
    if ((e.actor1_country && *e.actor1_country == iso3) || (e.actor2_country && *e.actor2_country == iso3))
      out.push_back(e);
  }
  return out;
}

/// ACLED events in the window whose country matches `name` after case-fold/trim.
inline std::vector<AcledEvent> filter_events(const std::vector<AcledEvent>& events, std::string_view name,
                                             DateWindow window) {
  if (window.start > window.end) throw Error(ErrorKind::InvalidArgument, "date window start after end");
  const auto key = text::fold_key(name);
  std::vector<AcledEvent> out;
  for (const auto& e : events) {
    if (window.contains(e.event_date) && text::fold_key(e.country) == key) out.push_back(e);
  }
  return out;
}

}  // namespace cfh::ingestion
