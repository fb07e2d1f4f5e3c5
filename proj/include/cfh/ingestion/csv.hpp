#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cfh::ingestion {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
  bool unterminated_quote = false;
};

/// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
/// line breaks; CRLF and LF both end records. Blank lines are skipped.
inline std::vector<CsvRecord> read_csv(std::string_view content, char sep = ',') {
  std::vector<CsvRecord> records;
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < content.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool record_done = false;
    while (i < content.size() && !record_done) {
      const char c = content[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < content.size() && content[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            in_quotes = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
        continue;
      }
      if (c == '"' && !field_started) {
        in_quotes = true;
        field_started = true;
        ++i;
      } else if (c == sep) {
        rec.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
        ++i;
      } else if (c == '\r' || c == '\n') {
        if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
        ++i;
        ++line;
        record_done = true;
      } else {
        field.push_back(c);
        field_started = true;
        ++i;
      }
    }
    rec.unterminated_quote = in_quotes;
    const bool blank = rec.fields.empty() && field.empty() && !field_started;
    if (blank) continue;
    rec.fields.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace cfh::ingestion
