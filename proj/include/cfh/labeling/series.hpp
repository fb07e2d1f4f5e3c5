#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfh/dates.hpp"
#include "cfh/ingestion/records.hpp"
#include "cfh/text.hpp"

namespace cfh::labeling {

enum class Granularity { Weekly, Monthly };

struct Bucket {
  Date period_start;
  std::int64_t fatalities = 0;

  bool operator==(const Bucket&) const = default;
};

struct FatalitySeries {
  std::string country;
  Granularity granularity = Granularity::Monthly;
  std::vector<Bucket> buckets;

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& b : buckets) t += b.fatalities;
    return t;
  }

  std::vector<std::int64_t> sums() const {
    std::vector<std::int64_t> out;
    out.reserve(buckets.size());
    for (const auto& b : buckets) out.push_back(b.fatalities);
    return out;
  }
};

inline Date bucket_start(Date d, Granularity g) {
  return g == Granularity::Monthly ? first_day(month_of(d)) : iso_week_start(d);
}

inline Date next_bucket(Date start, Granularity g) {
  return g == Granularity::Monthly ? first_day(add_months(month_of(start), 1)) : add_days(start, 7);
}

/// Sums fatalities of `country` events dated within [range.start, range.end]
/// into contiguous calendar-month or ISO-week buckets. Buckets are those
/// touching the range; periods without events are zero.
inline FatalitySeries aggregate_fatalities(const std::vector<ingestion::AcledEvent>& events, std::string_view country,
                                           Granularity granularity, DateWindow range) {
  if (range.start > range.end) throw Error(ErrorKind::EmptyRange, "range start after end");
  FatalitySeries series;
  series.country = std::string(country);
  series.granularity = granularity;
  const Date first = bucket_start(range.start, granularity);
  const Date last = bucket_start(range.end, granularity);
  for (Date d = first; d <= last; d = next_bucket(d, granularity)) series.buckets.push_back({d, 0});

  const auto key = text::fold_key(country);
  for (const auto& e : events) {
    if (!range.contains(e.event_date) || text::fold_key(e.country) != key) continue;
    const Date start = bucket_start(e.event_date, granularity);
    std::size_t idx = 0;
    if (granularity == Granularity::Monthly) {
      idx = static_cast<std::size_t>(months_between(month_of(first), month_of(start)));
    } else {
      idx = static_cast<std::size_t>((to_days(start) - to_days(first)).count() / 7);
    }
    series.buckets[idx].fatalities += e.fatalities;
  }
  return series;
}

/// Monthly sums for months [from, to] inclusive.
inline FatalitySeries monthly_series(const std::vector<ingestion::AcledEvent>& events, std::string_view country,
                                     Month from, Month to) {
  return aggregate_fatalities(events, country, Granularity::Monthly, {first_day(from), last_day(to)});
}

}  // namespace cfh::labeling
