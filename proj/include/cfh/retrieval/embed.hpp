#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfh/error.hpp"
#include "cfh/hashing.hpp"
#include "cfh/net/http.hpp"

namespace cfh::retrieval {

using EmbeddingVector = std::vector<double>;

/// Scales `v` to unit L2 norm. Throws NotEmbeddable for a zero or non-finite vector.
inline void normalize(EmbeddingVector& v) {
  double sq = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorKind::NotEmbeddable, "embedding has non-finite component");
    sq += x * x;
  }
  if (sq == 0.0) throw Error(ErrorKind::NotEmbeddable, "embedding is the zero vector");
  const double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
}

inline double l2_norm(const EmbeddingVector& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dims() const = 0;
  /// Unit-norm embedding of `text`.
  virtual EmbeddingVector embed(std::string_view text) = 0;
  virtual std::string name() const = 0;
};

/// Deterministic bag-of-tokens embedder for offline runs and tests: lowercase,
/// split on non-alphanumerics, hash each token into one of `dims` buckets with
/// a fixed seed, count, L2-normalize.
class HashingEmbedder final : public Embedder {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eed0f5eed0f5eedULL;

  explicit HashingEmbedder(std::size_t dims = 256, std::uint64_t seed = kDefaultSeed) : dims_(dims), seed_(seed) {
    if (dims_ == 0) throw Error(ErrorKind::InvalidArgument, "embedder dims must be positive");
  }

  std::size_t dims() const override { return dims_; }
  std::string name() const override { return "hashing-" + std::to_string(dims_); }

  EmbeddingVector embed(std::string_view text) override {
    EmbeddingVector v(dims_, 0.0);
    std::string token;
    bool any = false;
    auto flush = [&] {
      if (token.empty()) return;
      v[seeded_hash64(token, seed_) % dims_] += 1.0;
      any = true;
      token.clear();
    };
    for (char c : text) {
      const auto u = static_cast<unsigned char>(c);
      // Bytes >= 0x80 are kept so non-ASCII words still form tokens.
      if (std::isalnum(u) || u >= 0x80) token.push_back(static_cast<char>(std::tolower(u)));
      else flush();
    }
    flush();
    if (!any) throw Error(ErrorKind::NotEmbeddable, "text has no tokens");
    normalize(v);
    return v;
  }

 private:
  std::size_t dims_;
  std::uint64_t seed_;
};

struct RemoteEmbedderConfig {
  std::string endpoint_url;  // e.g. https://api.openai.com/v1/embeddings
  std::string model;
  std::string auth_token_env_var = "OPENAI_API_KEY";
  std::size_t dims = 1536;
  int timeout_ms = 60000;
};

/// Embeddings over the de facto `{"model","input"} -> data[0].embedding` JSON API.
class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(RemoteEmbedderConfig config, std::shared_ptr<net::HttpTransport> http)
      : config_(std::move(config)), http_(std::move(http)) {}

  std::size_t dims() const override { return config_.dims; }
  std::string name() const override { return "remote-" + config_.model; }

  EmbeddingVector embed(std::string_view text) override {
    if (text.empty()) throw Error(ErrorKind::NotEmbeddable, "empty text");
    const char* token = std::getenv(config_.auth_token_env_var.c_str());
    if (!token || !*token)
      throw Error(ErrorKind::AuthMissing, "environment variable " + config_.auth_token_env_var + " is not set");
    nlohmann::json body = {{"model", config_.model}, {"input", std::string(text)}};
    net::HttpResponse resp;
    try {
      resp = http_->post(config_.endpoint_url, {{"Authorization", std::string("Bearer ") + token}}, body.dump(),
                         "application/json", config_.timeout_ms);
    } catch (const net::TransportError& e) {
      throw Error(ErrorKind::EmbedFailed, e.what());
    }
    if (resp.status != 200) throw Error(ErrorKind::EmbedFailed, "HTTP " + std::to_string(resp.status));
    EmbeddingVector v;
    try {
      v = nlohmann::json::parse(resp.body).at("data").at(0).at("embedding").get<EmbeddingVector>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::EmbedFailed, std::string("malformed embedding response: ") + e.what());
    }
    if (v.size() != config_.dims)
      throw Error(ErrorKind::DimsMismatch, "endpoint returned " + std::to_string(v.size()) + " dims, expected " +
                                               std::to_string(config_.dims));
    normalize(v);
    return v;
  }

 private:
  RemoteEmbedderConfig config_;
  std::shared_ptr<net::HttpTransport> http_;
};

inline EmbeddingVector embed(std::string_view text, Embedder& embedder) { return embedder.embed(text); }

}  // namespace cfh::retrieval
