#include <gtest/gtest.h>

#include <random>

#include "cfh/retrieval/chunk.hpp"
#include "cfh/retrieval/embed.hpp"
#include "cfh/retrieval/flat_index.hpp"
#include "cfh/retrieval/summarize.hpp"

using namespace cfh;
using namespace cfh::retrieval;

namespace {

std::string sentences(std::size_t approx_chars, unsigned seed) {
  static const char* kWords[] = {"army", "rebels", "shelling", "market", "town", "aid", "road", "clashes", "talks"};
  std::mt19937 rng(seed);
  std::string out;
  while (out.size() < approx_chars) {
    const int n = 4 + static_cast<int>(rng() % 10);
    std::string s;
    for (int i = 0; i < n; ++i) s += std::string(i ? " " : "") + kWords[rng() % 9];
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    out += s + ". ";
  }
  return out;
}

// Ranks every entry by cos(a, b) = a.b / (|a||b|), treating scores within
// 1e-12 as tied and resolving ties by insertion position.
std::vector<std::string> brute_force(const std::vector<std::pair<std::string, EmbeddingVector>>& entries,
                                     const EmbeddingVector& q, std::size_t k) {
  std::vector<std::pair<long double, std::size_t>> scored;
  long double qn = 0;
  for (double x : q) qn += static_cast<long double>(x) * x;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    long double dot = 0, n = 0;
    for (std::size_t d = 0; d < q.size(); ++d) {
      dot += static_cast<long double>(entries[i].second[d]) * q[d];
      n += static_cast<long double>(entries[i].second[d]) * entries[i].second[d];
    }
    scored.push_back({dot / std::sqrt(n * qn), i});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (std::fabs(static_cast<double>(a.first - b.first)) > 1e-12) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(entries[scored[i].second].first);
  return out;
}

}  // namespace

TEST(Chunk, WindowArithmetic) {
  const std::string body1200(1200, 'x');
  auto c = chunk_text("u", body1200);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].begin, 0u);
  EXPECT_EQ(c[0].end, 1200u);

  const std::string body2200(2200, 'y');
  c = chunk_text("u", body2200);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].end - c[1].begin, 200u);
  EXPECT_EQ(c[1].end, 2200u);

  EXPECT_TRUE(chunk_text("u", "").empty());
  EXPECT_THROW(chunk_text("u", "abc", {100, 100, 10}), Error);
}

TEST(Chunk, PrefersSentenceEndsAndReassembles) {
  for (unsigned seed = 0; seed < 60; ++seed) {
    const auto body = sentences(500 + seed * 97, seed);
    ChunkingConfig cfg;
    cfg.chunk_chars = 300 + seed % 5 * 100;
    cfg.overlap_chars = seed % 3 * 60;
    cfg.boundary_slack = 50;
    const auto chunks = chunk_text("https://x/" + std::to_string(seed), body, cfg);
    ASSERT_FALSE(chunks.empty());
    EXPECT_EQ(reassemble(chunks), body);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      EXPECT_EQ(chunks[i].seq, i);
      EXPECT_LE(chunks[i].end, body.size());
      EXPECT_EQ(chunks[i].text, body.substr(chunks[i].begin, chunks[i].end - chunks[i].begin));
      if (chunks[i].end < body.size()) {
        const std::size_t target = chunks[i].begin + cfg.chunk_chars;
        bool boundary_nearby = false;
        for (std::size_t p = target - cfg.boundary_slack; p <= target + cfg.boundary_slack && p < body.size(); ++p)
          boundary_nearby = boundary_nearby || (body[p - 1] == '.' && body[p] == ' ');
        if (boundary_nearby) { EXPECT_EQ(body[chunks[i].end - 1], '.') << "seed " << seed << " chunk " << i; }
      }
    }
    EXPECT_EQ(chunk_text("https://x", body, cfg), chunk_text("https://x", body, cfg));
  }
}

TEST(Chunk, MultiByteBodiesStayValid) {
  std::string body;
  for (int i = 0; i < 400; ++i) body += "\xC3\xA9t\xC3\xA9 ";
  const auto chunks = chunk_text("u", body, {100, 30, 10});
  EXPECT_EQ(reassemble(chunks), body);
  for (const auto& c : chunks) {
    EXPECT_FALSE(text::is_utf8_continuation(body[c.begin]));
  }
}

TEST(Embed, HashingEmbedderContract) {
  HashingEmbedder e;
  EXPECT_EQ(e.dims(), 256u);
  EXPECT_EQ(e.embed("war war"), e.embed("war"));
  EXPECT_EQ(e.embed("Shelling in Khartoum!"), e.embed("Shelling in Khartoum!"));
  EXPECT_EQ(e.embed("WAR"), e.embed("war"));
  std::mt19937 rng(1);
  for (unsigned i = 0; i < 100; ++i) {
    const auto v = e.embed(sentences(50 + rng() % 500, i));
    EXPECT_NEAR(l2_norm(v), 1.0, 1e-9);
    for (double x : v) EXPECT_TRUE(std::isfinite(x));
  }
  try {
    e.embed(" ,.;! ");
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::NotEmbeddable);
  }
  EXPECT_NE(HashingEmbedder(256, 1).embed("army town"), HashingEmbedder(256, 2).embed("army town"));
}

TEST(Index, BasicSearchContract) {
  FlatIndex idx(3);
  idx.add("a", {1, 0, 0});
  idx.add("b", {0, 1, 0});
  idx.add("c", {0, 0, 2});
  auto hits = idx.search({1, 0, 0}, 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].id, "a");
  EXPECT_DOUBLE_EQ(hits[0].score, 1.0);
  EXPECT_DOUBLE_EQ(hits[1].score, 0.0);
  EXPECT_EQ(hits[1].id, "b");  // tie with "c" broken by insertion order
  EXPECT_EQ(idx.search({1, 1, 1}, 10).size(), 3u);
  EXPECT_THROW(idx.search({1, 0}, 1), Error);
  EXPECT_THROW(idx.add("d", {1, 0}), Error);
  EXPECT_THROW(idx.add("a", {1, 1, 0}), Error);
  EXPECT_THROW(idx.search({1, 0, 0}, 0), Error);
  auto filtered = idx.search({1, 0, 0}, 3, [](const std::string& id) { return id != "a"; });
  ASSERT_EQ(filtered.size(), 2u);
  EXPECT_EQ(filtered[0].id, "b");
}

TEST(Index, MatchesBruteForceAndRoundTrips) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;
  const auto path = std::filesystem::temp_directory_path() / "cfh_index_test.jsonl";
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dims = 8 + rng() % 40;
    const std::size_t n = 1 + rng() % 50;
    FlatIndex idx(dims);
    std::vector<std::pair<std::string, EmbeddingVector>> entries;
    for (std::size_t i = 0; i < n; ++i) {
      EmbeddingVector v(dims);
      if (i > 0 && rng() % 5 == 0) {
        v = entries[rng() % entries.size()].second;  // exact duplicate -> tie
      } else {
        for (auto& x : v) x = gauss(rng);
      }
      entries.push_back({"doc" + std::to_string(i), v});
      idx.add(entries.back().first, v);
    }
    idx.save(path);
    const auto loaded = FlatIndex::load(path);
    for (int q = 0; q < 5; ++q) {
      EmbeddingVector query(dims);
      for (auto& x : query) x = gauss(rng);
      if (q == 0) query = entries[rng() % n].second;
      const std::size_t k = 1 + rng() % 12;
      const auto hits = idx.search(query, k);
      std::vector<std::string> ids;
      for (const auto& h : hits) ids.push_back(h.id);
      EXPECT_EQ(ids, brute_force(entries, query, k));
      EXPECT_EQ(hits.size(), std::min(k, n));
      for (std::size_t i = 1; i < hits.size(); ++i) EXPECT_GE(hits[i - 1].score, hits[i].score);
      for (const auto& h : hits) {
        EXPECT_GE(h.score, -1.0);
        EXPECT_LE(h.score, 1.0);
      }
      EXPECT_EQ(loaded.search(query, k), hits);
    }
  }
  std::filesystem::remove(path);
}

TEST(Summary, ExtractiveContract) {
  EXPECT_EQ(summarize({}, nullptr).text, "");
  EXPECT_TRUE(summarize({}, nullptr).source_chunk_ids.empty());

  Chunk one{"https://x", 0, "Shelling hit the market. Aid was blocked. Talks stalled.", 0, 57};
  auto s = summarize_extractive({one}, 1500);
  EXPECT_EQ(s.method, SummaryMethod::Extractive);
  EXPECT_EQ(s.text, one.text);
  EXPECT_EQ(s.source_chunk_ids, std::vector<std::string>{"https://x#0"});

  std::vector<Chunk> chunks;
  for (unsigned i = 0; i < 12; ++i) {
    const auto t = sentences(400, i);
    chunks.push_back({"https://d/" + std::to_string(i), 0, t, 0, t.size()});
  }
  for (std::size_t budget : {0, 5, 60, 300, 1500, 100000}) {
    const auto a = summarize_extractive(chunks, budget);
    EXPECT_LE(a.text.size(), budget);
    EXPECT_EQ(a.text, summarize_extractive(chunks, budget).text);
    if (budget > 0) { EXPECT_FALSE(a.source_chunk_ids.empty()); }
  }
  // Round robin: the first sentence of the second chunk precedes the second
  // sentence of the first.
  const auto rr = summarize_extractive(chunks, 100000);
  const auto first = text::split_sentences(chunks[0].text);
  const auto second = text::split_sentences(chunks[1].text);
  EXPECT_LT(rr.text.find(second[0]), rr.text.find(first[1]));
}

namespace {

class FixedClient : public llm::ChatClient {
 public:
  explicit FixedClient(std::string reply, bool fail = false) : reply_(std::move(reply)), fail_(fail) {}
  std::string complete(const llm::ChatRequest& r) override {
    last = r;
    if (fail_) throw Error(ErrorKind::ProviderExhausted, "down");
    return reply_;
  }
  llm::ChatRequest last;

 private:
  std::string reply_;
  bool fail_;
};

}  // namespace

TEST(Summary, LlmBackedAndDegraded) {
  std::vector<Chunk> chunks = {{"https://a", 0, "Clashes in the north. More text.", 0, 30}};
  FixedClient ok("A short briefing.");
  auto s = summarize(chunks, &ok);
  EXPECT_EQ(s.method, SummaryMethod::LlmBacked);
  EXPECT_EQ(s.text, "A short briefing.");
  EXPECT_EQ(s.source_chunk_ids, std::vector<std::string>{"https://a#0"});
  EXPECT_NE(ok.last.user_text.find("Clashes in the north."), std::string::npos);
  EXPECT_EQ(ok.last.tags.at("purpose"), "summary");

  FixedClient down("", true);
  s = summarize(chunks, &down);
  EXPECT_EQ(s.method, SummaryMethod::Extractive);
  EXPECT_FALSE(s.degraded_reason.empty());
  EXPECT_EQ(s.text, "Clashes in the north. More text.");

  FixedClient verbose(std::string(5000, 'z'));
  EXPECT_EQ(summarize(chunks, &verbose).text.size(), 1500u);
}
