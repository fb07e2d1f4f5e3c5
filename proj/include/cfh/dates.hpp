#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "cfh/error.hpp"

namespace cfh {

using Date = std::chrono::year_month_day;
using Month = std::chrono::year_month;

inline std::chrono::sys_days to_days(Date d) { return std::chrono::sys_days{d}; }
inline Date from_days(std::chrono::sys_days d) { return Date{d}; }

inline Date add_days(Date d, int n) { return from_days(to_days(d) + std::chrono::days{n}); }

inline Date first_day(Month m) { return m / std::chrono::day{1}; }
inline Date last_day(Month m) { return Date{m / std::chrono::last}; }
inline Month month_of(Date d) { return d.year() / d.month(); }
inline Month add_months(Month m, int n) { return m + std::chrono::months{n}; }

/// Signed number of months from `a` to `b`.
inline int months_between(Month a, Month b) {
  return (static_cast<int>(b.year()) - static_cast<int>(a.year())) * 12 +
         (static_cast<int>(static_cast<unsigned>(b.month())) -
          static_cast<int>(static_cast<unsigned>(a.month())));
}

/// Monday of the ISO week containing `d`.
inline Date iso_week_start(Date d) {
  auto days = to_days(d);
  const unsigned since_monday = (std::chrono::weekday{days}.c_encoding() + 6) % 7;
  return from_days(days - std::chrono::days{since_monday});
}

struct DateWindow {
  Date start;
  Date end;

  bool contains(Date d) const { return d >= start && d <= end; }
};

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

inline std::optional<unsigned> month_from_name(std::string_view name) {
  static constexpr std::array<std::string_view, 12> kNames = {
      "january", "february", "march",     "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december"};
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
  for (unsigned i = 0; i < kNames.size(); ++i) {
    if (lower == kNames[i] || (lower.size() == 3 && kNames[i].substr(0, 3) == lower)) return i + 1;
  }
  return std::nullopt;
}

inline std::optional<Date> make_date(int y, int m, int d) {
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok() || m < 1 || m > 12 || d < 1) return std::nullopt;
  return date;
}

}  // namespace detail

/// Accepts `YYYY-MM-DD`, `YYYYMMDD` (GDELT SQLDATE) and `15 April 2023` (ACLED exports).
inline std::optional<Date> try_parse_date(std::string_view s) {
  using detail::all_digits;
  using detail::to_int;
  if (s.size() == 10 && s[4] == '-' && s[7] == '-' && all_digits(s.substr(0, 4)) &&
      all_digits(s.substr(5, 2)) && all_digits(s.substr(8, 2))) {
    return detail::make_date(to_int(s.substr(0, 4)), to_int(s.substr(5, 2)), to_int(s.substr(8, 2)));
  }
  if (s.size() == 8 && all_digits(s)) {
    return detail::make_date(to_int(s.substr(0, 4)), to_int(s.substr(4, 2)), to_int(s.substr(6, 2)));
  }
  const auto sp1 = s.find(' ');
  const auto sp2 = s.rfind(' ');
  if (sp1 != std::string_view::npos && sp2 != sp1) {
    auto day = s.substr(0, sp1);
    auto mon = s.substr(sp1 + 1, sp2 - sp1 - 1);
    auto year = s.substr(sp2 + 1);
    if (all_digits(day) && day.size() <= 2 && all_digits(year) && year.size() == 4) {
      if (auto m = detail::month_from_name(mon))
        return detail::make_date(to_int(year), static_cast<int>(*m), to_int(day));
    }
  }
  return std::nullopt;
}

inline Date parse_date(std::string_view s) {
  if (auto d = try_parse_date(s)) return *d;
  throw Error(ErrorKind::InvalidArgument, "invalid date '" + std::string(s) + "'");
}

/// `YYYY-MM`.
inline std::optional<Month> try_parse_month(std::string_view s) {
  if (s.size() != 7 || s[4] != '-' || !detail::all_digits(s.substr(0, 4)) ||
      !detail::all_digits(s.substr(5, 2)))
    return std::nullopt;
  const int m = detail::to_int(s.substr(5, 2));
  if (m < 1 || m > 12) return std::nullopt;
  return std::chrono::year{detail::to_int(s.substr(0, 4))} / std::chrono::month{static_cast<unsigned>(m)};
}

inline Month parse_month(std::string_view s) {
  if (auto m = try_parse_month(s)) return *m;
  throw Error(ErrorKind::InvalidArgument, "invalid month '" + std::string(s) + "' (expected YYYY-MM)");
}

inline std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

inline std::string format_month(Month m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(m.year()), static_cast<unsigned>(m.month()));
  return buf;
}

/// "May 2023".
inline std::string month_long_name(Month m) {
  static constexpr std::array<const char*, 12> kNames = {
      "January", "February", "March",     "April",   "May",      "June",
      "July",    "August",   "September", "October", "November", "December"};
  return std::string(kNames[static_cast<unsigned>(m.month()) - 1]) + " " +
         std::to_string(static_cast<int>(m.year()));
}

}  // namespace cfh
