#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfh/ingestion/records.hpp"
#include "cfh/text.hpp"

namespace cfh::retrieval {

struct Chunk {
  std::string doc_url;
  std::size_t seq = 0;
  std::string text;
  std::size_t begin = 0;  // byte offsets into the article body, [begin, end)
  std::size_t end = 0;

  std::string id() const { return doc_url + "#" + std::to_string(seq); }
  bool operator==(const Chunk&) const = default;
};

struct ChunkingConfig {
  std::size_t chunk_chars = 1200;
  std::size_t overlap_chars = 200;
  std::size_t boundary_slack = 100;  // how far a cut may move to reach a sentence end
};

namespace detail {

/// Position just after a sentence terminator ('.', '!', '?' followed by
/// whitespace) closest to `target` within [lo, hi], or `target` if none.
inline std::size_t sentence_cut(std::string_view body, std::size_t target, std::size_t lo, std::size_t hi) {
  std::size_t best = target;
  std::size_t best_dist = std::string_view::npos;
  hi = std::min(hi, body.size());
  for (std::size_t pos = std::max<std::size_t>(lo, 1); pos <= hi; ++pos) {
    const char prev = body[pos - 1];
    if (prev != '.' && prev != '!' && prev != '?') continue;
    if (pos < body.size() && !text::is_space(body[pos])) continue;
    const std::size_t dist = pos > target ? pos - target : target - pos;
    if (dist < best_dist) {
      best_dist = dist;
      best = pos;
    }
  }
  return best;
}

}  // namespace detail

/// Greedy fixed-size windows over one body. Each window ends near
/// `begin + chunk_chars`, moved to the closest sentence end within the slack;
/// the next window starts `overlap_chars` before the previous end.
inline std::vector<Chunk> chunk_text(const std::string& url, std::string_view body, const ChunkingConfig& config = {}) {
  if (config.chunk_chars <= config.overlap_chars)
    throw Error(ErrorKind::InvalidArgument, "chunk_chars must exceed overlap_chars");
  std::vector<Chunk> out;
  std::size_t begin = 0;
  while (begin < body.size()) {
    std::size_t end = body.size();
    if (body.size() - begin > config.chunk_chars) {
      const std::size_t target = begin + config.chunk_chars;
      const std::size_t min_end = begin + config.overlap_chars + 1;
      const std::size_t lo = std::max(min_end, target > config.boundary_slack ? target - config.boundary_slack : 0);
      end = detail::sentence_cut(body, target, lo, target + config.boundary_slack);
      end = text::utf8_floor(body, end);
      if (end < min_end) end = std::min(body.size(), min_end);
    }
    out.push_back(Chunk{url, out.size(), std::string(body.substr(begin, end - begin)), begin, end});
    if (end >= body.size()) break;
    std::size_t next = text::utf8_floor(body, end - config.overlap_chars);
    if (next <= begin) {
      next = end - config.overlap_chars;
      while (next < end && text::is_utf8_continuation(body[next])) ++next;
    }
    begin = next;
  }
  return out;
}

inline std::vector<Chunk> chunk_articles(const std::vector<ingestion::Article>& articles,
                                         const ChunkingConfig& config = {}) {
  std::vector<Chunk> out;
  for (const auto& a : articles) {
    auto chunks = chunk_text(a.url, a.body, config);
    out.insert(out.end(), std::make_move_iterator(chunks.begin()), std::make_move_iterator(chunks.end()));
  }
  return out;
}

/// Rebuilds a body from its chunks by dropping each chunk's overlap with the
/// previous one.
inline std::string reassemble(const std::vector<Chunk>& chunks) {
  std::string out;
  std::size_t covered = 0;
  for (const auto& c : chunks) {
    if (c.end <= covered) continue;
    const std::size_t skip = covered > c.begin ? covered - c.begin : 0;
    out += c.text.substr(skip);
    covered = c.end;
  }
  return out;
}

inline nlohmann::json to_json(const Chunk& c) {
  return {{"doc_url", c.doc_url}, {"seq", c.seq}, {"text", c.text}, {"span", {c.begin, c.end}}};
}

inline Chunk chunk_from_json(const nlohmann::json& j) {
  Chunk c;
  c.doc_url = j.at("doc_url").get<std::string>();
  c.seq = j.at("seq").get<std::size_t>();
  c.text = j.at("text").get<std::string>();
  c.begin = j.at("span").at(0).get<std::size_t>();
  c.end = j.at("span").at(1).get<std::size_t>();
  return c;
}

}  // namespace cfh::retrieval
