#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "cfh/error.hpp"
#include "cfh/hashing.hpp"

namespace cfh::llm {

inline constexpr double kDefaultTemperature = 0.2;

struct ChatRequest {
  std::string model_id;
  double temperature = kDefaultTemperature;
  std::string system_text;
  std::string user_text;
  int max_tokens = 512;
  /// Routing metadata (country, month, experiment) for scripted mocks and logs.
  /// Not sent to providers and not part of the cache key.
  std::map<std::string, std::string> tags;

  void validate() const {
    if (user_text.empty()) throw Error(ErrorKind::InvalidArgument, "chat request has empty user_text");
    if (!(temperature >= 0.0 && temperature <= 2.0))
      throw Error(ErrorKind::InvalidArgument, "temperature must be within [0, 2]");
    if (max_tokens <= 0) throw Error(ErrorKind::InvalidArgument, "max_tokens must be positive");
  }
};

/// The fields that determine a reply, in canonical JSON form.
inline nlohmann::json cache_key_json(const ChatRequest& r) {
  return {{"model_id", r.model_id},
          {"temperature", r.temperature},
          {"system_text", r.system_text},
          {"user_text", r.user_text}};
}

/// SHA-256 over the canonical key fields.
inline std::string request_digest(const ChatRequest& r) { return sha256_hex(cache_key_json(r).dump()); }

/// Blocking chat-completion interface shared by HTTP providers and mocks.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

}  // namespace cfh::llm
