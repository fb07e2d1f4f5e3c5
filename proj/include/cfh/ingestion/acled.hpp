#pragma once

#include <charconv>
#include <istream>
#include <iterator>

#include "cfh/ingestion/csv.hpp"
#include "cfh/ingestion/records.hpp"
#include "cfh/text.hpp"

namespace cfh::ingestion {

/// Parses an ACLED CSV export. The header row must name `event_date`,
/// `country` and `fatalities` (any order, case-insensitive); other columns are
/// ignored.
inline ParseResult<AcledEvent> parse_acled_csv(std::string_view content) {
  auto rows = read_csv(content);
  if (rows.empty()) throw Error(ErrorKind::MissingHeader, "ACLED input has no header row");

  const auto& header = rows.front().fields;
  auto find_col = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::string h = text::fold_key(header[i]);
      if (i == 0 && h.starts_with("\xEF\xBB\xBF")) h.erase(0, 3);  // BOM
      if (h == name) return i;
    }
    throw Error(ErrorKind::MissingHeader, "ACLED header lacks column '" + std::string(name) + "'");
  };
  const std::size_t c_date = find_col("event_date");
  const std::size_t c_country = find_col("country");
  const std::size_t c_fatal = find_col("fatalities");
  const std::size_t needed = std::max({c_date, c_country, c_fatal}) + 1;

  ParseResult<AcledEvent> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.unterminated_quote) {
      out.rejects.add(row.line, "unterminated quoted field");
      continue;
    }
    if (row.fields.size() < needed) {
      out.rejects.add(row.line, "too few fields");
      continue;
    }
    auto date = try_parse_date(text::trim(row.fields[c_date]));
    if (!date) {
      out.rejects.add(row.line, "unparseable event_date");
      continue;
    }
    auto country = text::trim(row.fields[c_country]);
    if (country.empty()) {
      out.rejects.add(row.line, "empty country");
      continue;
    }
    auto fat_text = text::trim(row.fields[c_fatal]);
    std::int64_t fatalities = 0;
    auto [ptr, ec] = std::from_chars(fat_text.data(), fat_text.data() + fat_text.size(), fatalities, 10);
    if (fat_text.empty() || ec != std::errc{} || ptr != fat_text.data() + fat_text.size()) {
      out.rejects.add(row.line, "fatalities is not a base-10 integer");
      continue;
    }
    if (fatalities < 0) {
      out.rejects.add(row.line, "negative fatalities");
      continue;
    }
    out.records.push_back(AcledEvent{*date, std::string(country), fatalities});
  }
  return out;
}

inline ParseResult<AcledEvent> parse_acled_csv(std::istream& in) {
  if (!in) throw Error(ErrorKind::UnreadableStream, "ACLED stream is not readable");
  std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw Error(ErrorKind::UnreadableStream, "read error on ACLED stream");
  return parse_acled_csv(std::string_view(content));
}

}  // namespace cfh::ingestion
