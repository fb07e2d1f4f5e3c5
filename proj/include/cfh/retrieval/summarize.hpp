#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfh/llm/chat.hpp"
#include "cfh/retrieval/chunk.hpp"
#include "cfh/text.hpp"

namespace cfh::retrieval {

enum class SummaryMethod { LlmBacked, Extractive };

inline std::string_view to_string(SummaryMethod m) { return m == SummaryMethod::LlmBacked ? "LlmBacked" : "Extractive"; }

struct Summary {
  std::string text;
  std::vector<std::string> source_chunk_ids;
  SummaryMethod method = SummaryMethod::Extractive;
  std::string degraded_reason;  // set when an LLM summary was attempted and failed
};

struct SummarizerConfig {
  std::size_t char_budget = 1500;
  std::size_t request_char_budget = 8000;  // excerpt text sent in one summarization call
  std::string model_id = "gpt-3.5-turbo";
  double temperature = llm::kDefaultTemperature;
  int max_tokens = 512;
};

inline constexpr std::string_view kSummaryInstruction =
    "Summarize the following conflict-related news excerpts into a short factual briefing. "
    "Focus on violent events, the actors involved, locations, and reported fatalities. "
    "Use only information present in the excerpts.";

/// Round-robin over the chunks' sentences (first sentence of each chunk, then
/// the second, ...) until the next sentence would exceed the budget.
inline Summary summarize_extractive(const std::vector<Chunk>& chunks, std::size_t char_budget) {
  Summary s;
  s.method = SummaryMethod::Extractive;
  if (chunks.empty() || char_budget == 0) return s;

  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(chunks.size());
  std::size_t max_len = 0;
  for (const auto& c : chunks) {
    sentences.push_back(text::split_sentences(text::collapse_whitespace(c.text)));
    max_len = std::max(max_len, sentences.back().size());
  }
  std::vector<bool> used(chunks.size(), false);
  std::set<std::string> seen;
  bool full = false;
  for (std::size_t round = 0; round < max_len && !full; ++round) {
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      if (round >= sentences[c].size()) continue;
      const auto& sentence = sentences[c][round];
      // A chunk that starts mid-sentence yields a lowercase fragment first;
      // overlapping chunks repeat whole sentences.
      if (round == 0 && !sentence.empty() && std::islower(static_cast<unsigned char>(sentence[0]))) continue;
      if (!seen.insert(sentence).second) continue;
      const std::size_t extra = sentence.size() + (s.text.empty() ? 0 : 1);
      if (s.text.size() + extra > char_budget) {
        full = true;
        break;
      }
      if (!s.text.empty()) s.text.push_back(' ');
      s.text += sentence;
      used[c] = true;
    }
  }
  if (s.text.empty()) {
    // Even the first sentence is over budget: keep its prefix.
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      if (sentences[c].empty()) continue;
      s.text = text::truncate_utf8(sentences[c][0], char_budget);
      used[c] = !s.text.empty();
      break;
    }
  }
  for (std::size_t c = 0; c < chunks.size(); ++c)
    if (used[c]) s.source_chunk_ids.push_back(chunks[c].id());
  return s;
}

/// LLM-backed summary with a silent-but-recorded fallback to extractive.
inline Summary summarize(const std::vector<Chunk>& chunks, llm::ChatClient* client,
                         const SummarizerConfig& config = {}) {
  if (chunks.empty()) return Summary{};
  if (!client) return summarize_extractive(chunks, config.char_budget);

  llm::ChatRequest req;
  req.model_id = config.model_id;
  req.temperature = config.temperature;
  req.max_tokens = config.max_tokens;
  req.system_text = "You are an analyst preparing conflict early-warning briefings.";
  req.user_text = std::string(kSummaryInstruction) + " Keep it under " + std::to_string(config.char_budget) +
                  " characters.\n\n";
  req.tags["purpose"] = "summary";
  std::vector<std::string> sources;
  std::size_t used = 0;
  for (const auto& c : chunks) {
    const std::string excerpt = "[" + std::to_string(sources.size() + 1) + "] " + text::collapse_whitespace(c.text);
    if (!sources.empty() && used + excerpt.size() > config.request_char_budget) break;
    req.user_text += excerpt + "\n\n";
    used += excerpt.size();
    sources.push_back(c.id());
  }
  try {
    auto reply = text::collapse_whitespace(client->complete(req));
    if (reply.empty()) throw Error(ErrorKind::ProviderRejected, "empty summary reply");
    Summary s;
    s.method = SummaryMethod::LlmBacked;
    s.text = text::truncate_utf8(reply, config.char_budget);
    s.source_chunk_ids = std::move(sources);
    return s;
  } catch (const std::exception& e) {
    auto s = summarize_extractive(chunks, config.char_budget);
    s.degraded_reason = e.what();
    return s;
  }
}

inline nlohmann::json to_json(const Summary& s) {
  return {{"text", s.text}, {"source_chunk_ids", s.source_chunk_ids}, {"method", to_string(s.method)}};
}

}  // namespace cfh::retrieval
