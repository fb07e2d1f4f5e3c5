#pragma once

#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cfh/io.hpp"
#include "cfh/llm/chat.hpp"

namespace cfh::llm {

/// Shell-style match supporting '*' (any run) and '?' (one char).
inline bool glob_match(std::string_view pattern, std::string_view value) {
  std::size_t p = 0, v = 0, star = std::string_view::npos, mark = 0;
  while (v < value.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == value[v])) {
      ++p;
      ++v;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = v;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      v = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

struct MockRule {
  std::optional<std::string> digest;           // exact request digest
  std::map<std::string, std::string> match;    // tag name -> glob pattern
  std::string reply;
};

struct MockDefault {
  int max_fatalities = 1000;
  double range_probability = 0.3;  // chance of answering with a "low-high" range
};

struct MockScript {
  std::vector<MockRule> rules;
  std::optional<MockDefault> fallback;
};

inline MockScript mock_script_from_json(const nlohmann::json& j) {
  MockScript s;
  for (const auto& r : j.value("rules", nlohmann::json::array())) {
    MockRule rule;
    if (r.contains("digest")) rule.digest = r.at("digest").get<std::string>();
    for (const auto& key : {"country", "month", "experiment", "purpose"}) {
      if (r.contains(key)) rule.match[key] = r.at(key).get<std::string>();
    }
    rule.reply = r.at("reply").get<std::string>();
    s.rules.push_back(std::move(rule));
  }
  if (j.contains("default") && !j.at("default").is_null()) {
    MockDefault d;
    d.max_fatalities = j.at("default").value("max_fatalities", d.max_fatalities);
    d.range_probability = j.at("default").value("range_probability", d.range_probability);
    s.fallback = d;
  }
  return s;
}

/// Deterministic scripted client. Rules are tried in order; with no match the
/// default rule (if any) synthesizes a reply from a generator seeded by
/// (seed, request digest), so replies do not depend on call order.
class MockClient final : public ChatClient {
 public:
  MockClient(MockScript script, std::uint64_t seed) : script_(std::move(script)), seed_(seed) {}

  std::string complete(const ChatRequest& request) override {
    request.validate();
    const auto digest = request_digest(request);
    for (const auto& rule : script_.rules) {
      if (rule.digest && *rule.digest != digest) continue;
      if (!rule.digest && rule.match.empty()) continue;
      bool ok = true;
      for (const auto& [tag, pattern] : rule.match) {
        auto it = request.tags.find(tag);
        if (it == request.tags.end() || !glob_match(pattern, it->second)) {
          ok = false;
          break;
        }
      }
      if (ok) return rule.reply;
    }
    if (!script_.fallback) throw Error(ErrorKind::NoScriptMatch, "no mock rule for request " + digest);
    return synthesize(*script_.fallback, digest);
  }

 private:
  std::string synthesize(const MockDefault& d, const std::string& digest) const {
    static constexpr std::array<const char*, 4> kLabels = {"Escalate", "De-escalate", "Peace/No Conflict",
                                                           "Stable Conflict"};
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(std::stoul(digest.substr(0, 8), nullptr, 16)),
                      static_cast<std::uint32_t>(std::stoul(digest.substr(8, 8), nullptr, 16))};
    std::mt19937_64 rng(seq);
    // Distributions are implementation-defined across standard libraries; draw
    // raw words and reduce them by hand so replies are portable.
    const auto label = kLabels[rng() % kLabels.size()];
    const auto span = static_cast<std::uint64_t>(std::max(0, d.max_fatalities)) + 1;
    const auto a = static_cast<long long>(rng() % span);
    const bool as_range = static_cast<double>(rng() % 1000000) / 1e6 < d.range_probability;
    std::string fatalities;
    if (as_range) {
      const auto b = a + static_cast<long long>(rng() % (span / 4 + 1));
      fatalities = std::to_string(a) + "-" + std::to_string(b);
    } else {
      fatalities = std::to_string(a);
    }
    return std::string("TREND: ") + label + "\nFATALITIES: " + fatalities;
  }

  MockScript script_;
  std::uint64_t seed_;
};

inline std::string mock_complete(const ChatRequest& request, const MockScript& script, std::uint64_t seed) {
  return MockClient(script, seed).complete(request);
}

}  // namespace cfh::llm
