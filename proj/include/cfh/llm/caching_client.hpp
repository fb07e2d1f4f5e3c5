#pragma once

#include <memory>

#include "cfh/llm/chat.hpp"
#include "cfh/llm/replay_cache.hpp"

namespace cfh::llm {

/// Adds record/replay behaviour to any client. Under Replay the inner client
/// is never called.
class CachingClient final : public ChatClient {
 public:
  CachingClient(std::shared_ptr<ChatClient> inner, std::shared_ptr<ReplayCache> cache, CacheMode mode)
      : inner_(std::move(inner)), cache_(std::move(cache)), mode_(mode) {
    if (mode_ != CacheMode::Off && !cache_) throw Error(ErrorKind::Config, "cache mode requires a cache directory");
  }

  std::string complete(const ChatRequest& request) override {
    request.validate();
    if (reads_cache(mode_)) {
      if (auto hit = cache_->lookup(request)) return *hit;
      if (mode_ == CacheMode::Replay)
        throw Error(ErrorKind::ReplayMiss, "no cached reply for request " + request_digest(request));
    }
    auto reply = inner_->complete(request);
    if (writes_cache(mode_)) cache_->store(request, reply);
    return reply;
  }

 private:
  std::shared_ptr<ChatClient> inner_;
  std::shared_ptr<ReplayCache> cache_;
  CacheMode mode_;
};

}  // namespace cfh::llm
