#pragma once

#include <cmath>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <random>
#include <string>

#include "cfh/llm/chat.hpp"
#include "cfh/llm/rate_limiter.hpp"
#include "cfh/llm/replay_cache.hpp"
#include "cfh/net/http.hpp"

namespace cfh::llm {

struct ProviderConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  /// Name of the environment variable holding the API token. The token itself
  /// never appears in configuration.
  std::string auth_token_env_var = "OPENAI_API_KEY";
  int max_retries = 5;
  int base_backoff_ms = 1000;
  int max_backoff_ms = 60000;
  int timeout_ms = 60000;
  double requests_per_minute = 30.0;
};

/// Full-jitter exponential backoff: uniform in [0, min(cap, base * 2^attempt)].
class Backoff {
 public:
  Backoff(int base_ms, int cap_ms, std::uint64_t seed) : base_ms_(base_ms), cap_ms_(cap_ms), rng_(seed) {}

  std::chrono::milliseconds delay(int attempt) {
    const double ceiling = std::min(static_cast<double>(cap_ms_), base_ms_ * std::ldexp(1.0, attempt));
    std::lock_guard lock(mu_);
    std::uniform_real_distribution<double> dist(0.0, ceiling);
    return std::chrono::milliseconds(static_cast<long long>(dist(rng_)));
  }

  static double ceiling_ms(int base_ms, int cap_ms, int attempt) {
    return std::min(static_cast<double>(cap_ms), base_ms * std::ldexp(1.0, attempt));
  }

 private:
  int base_ms_;
  int cap_ms_;
  std::mt19937_64 rng_;
  std::mutex mu_;
};

inline bool is_retryable_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

/// Chat-completions client over HTTP with retries, client-side rate limiting
/// and an optional record/replay cache.
class HttpChatClient final : public ChatClient {
 public:
  struct Options {
    CacheMode cache_mode = CacheMode::Off;
    std::shared_ptr<ReplayCache> cache;
    SleepFn sleep = real_sleep();
    std::uint64_t jitter_seed = 0x1234;
    std::shared_ptr<RateLimiter> limiter;  // defaults to one built from requests_per_minute
  };

  HttpChatClient(ProviderConfig provider, std::shared_ptr<net::HttpTransport> http, Options options)
      : provider_(std::move(provider)),
        http_(std::move(http)),
        options_(std::move(options)),
        backoff_(provider_.base_backoff_ms, provider_.max_backoff_ms, options_.jitter_seed) {
    if ((reads_cache(options_.cache_mode) || writes_cache(options_.cache_mode)) && !options_.cache)
      throw Error(ErrorKind::Config, "cache mode requires a cache directory");
    if (!options_.limiter) options_.limiter = std::make_shared<RateLimiter>(provider_.requests_per_minute);
  }

  std::string complete(const ChatRequest& request) override {
    request.validate();
    if (reads_cache(options_.cache_mode)) {
      if (auto hit = options_.cache->lookup(request)) return *hit;
      if (options_.cache_mode == CacheMode::Replay)
        throw Error(ErrorKind::ReplayMiss, "no cached reply for request " + request_digest(request));
    }
    auto reply = call_provider(request);
    if (writes_cache(options_.cache_mode)) options_.cache->store(request, reply);
    return reply;
  }

  std::size_t attempts() const {
    std::lock_guard lock(stats_mu_);
    return attempts_;
  }

 private:
  std::string call_provider(const ChatRequest& request) {
    const char* token = std::getenv(provider_.auth_token_env_var.c_str());
    if (!token || !*token)
      throw Error(ErrorKind::AuthMissing, "environment variable " + provider_.auth_token_env_var + " is not set");
    const nlohmann::json body = {
        {"model", request.model_id},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
        {"messages",
         {{{"role", "system"}, {"content", request.system_text}}, {{"role", "user"}, {"content", request.user_text}}}}};
    const net::HttpHeaders headers = {{"Authorization", std::string("Bearer ") + token}};
    const std::string payload = body.dump();

    std::string last_failure;
    for (int attempt = 0; attempt <= provider_.max_retries; ++attempt) {
      options_.limiter->acquire();
      {
        std::lock_guard lock(stats_mu_);
        ++attempts_;
      }
      try {
        auto resp = http_->post(provider_.endpoint_url, headers, payload, "application/json", provider_.timeout_ms);
        if (resp.status == 200) return extract_content(resp.body);
        if (!is_retryable_status(resp.status))
          throw Error(ErrorKind::ProviderRejected, "provider answered HTTP " + std::to_string(resp.status));
        last_failure = "HTTP " + std::to_string(resp.status);
      } catch (const net::TransportError& e) {
        last_failure = e.what();
      }
      if (attempt < provider_.max_retries) options_.sleep(backoff_.delay(attempt));
    }
    throw Error(ErrorKind::ProviderExhausted, std::to_string(provider_.max_retries + 1) +
                                                  " attempts failed; last: " + last_failure);
  }

  static std::string extract_content(const std::string& body) {
    try {
      return nlohmann::json::parse(body).at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ProviderRejected, std::string("malformed completion response: ") + e.what());
    }
  }

  ProviderConfig provider_;
  std::shared_ptr<net::HttpTransport> http_;
  Options options_;
  Backoff backoff_;
  mutable std::mutex stats_mu_;
  std::size_t attempts_ = 0;
};

/// Serves replies from the cache only; anything else is a ReplayMiss. Used
/// when no provider is configured at all.
class ReplayOnlyClient final : public ChatClient {
 public:
  explicit ReplayOnlyClient(std::shared_ptr<ReplayCache> cache) : cache_(std::move(cache)) {}

  std::string complete(const ChatRequest& request) override {
    request.validate();
    if (auto hit = cache_->lookup(request)) return *hit;
    throw Error(ErrorKind::ReplayMiss, "no cached reply for request " + request_digest(request));
  }

 private:
  std::shared_ptr<ReplayCache> cache_;
};

}  // namespace cfh::llm
