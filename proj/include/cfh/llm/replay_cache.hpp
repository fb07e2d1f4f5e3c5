#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "cfh/io.hpp"
#include "cfh/llm/chat.hpp"

namespace cfh::llm {

enum class CacheMode { Off, Record, Replay, ReplayThenRecord };

inline CacheMode cache_mode_from_string(std::string_view s) {
  if (s == "Off") return CacheMode::Off;
  if (s == "Record") return CacheMode::Record;
  if (s == "Replay") return CacheMode::Replay;
  if (s == "ReplayThenRecord") return CacheMode::ReplayThenRecord;
  throw Error(ErrorKind::Config, "unknown cache mode '" + std::string(s) + "'");
}

inline bool reads_cache(CacheMode m) { return m == CacheMode::Replay || m == CacheMode::ReplayThenRecord; }
inline bool writes_cache(CacheMode m) { return m == CacheMode::Record || m == CacheMode::ReplayThenRecord; }

/// Content-addressed reply store: one `<sha256>.json` file per request holding
/// the key fields and the verbatim reply.
class ReplayCache {
 public:
  explicit ReplayCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path_for(const ChatRequest& r) const { return dir_ / (request_digest(r) + ".json"); }

  std::optional<std::string> lookup(const ChatRequest& r) const {
    const auto path = path_for(r);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    const auto entry = nlohmann::json::parse(io::read_file(path));
    if (entry.at("request") != cache_key_json(r))
      throw Error(ErrorKind::Io, "cache entry " + path.string() + " does not match its request");
    return entry.at("reply").get<std::string>();
  }

  void store(const ChatRequest& r, const std::string& reply) {
    nlohmann::json entry = {{"digest", request_digest(r)}, {"request", cache_key_json(r)}, {"reply", reply}};
    std::lock_guard lock(mu_);
    io::write_file_atomic(path_for(r), entry.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  std::mutex mu_;
};

}  // namespace cfh::llm
