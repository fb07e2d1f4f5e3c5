#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "cfh/hashing.hpp"
#include "cfh/ingestion/fetch.hpp"
#include "cfh/io.hpp"
#include "cfh/pipeline/config.hpp"
#include "cfh/version.hpp"

namespace cfh::pipeline {

inline std::string file_checksum(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return "missing";
  return sha256_hex(io::read_file(path));
}

/// runs/{run_id}/run_manifest.json. Each stage records its inputs' checksums
/// when it starts and its timing and status when it ends; both writes replace
/// the file atomically.
class RunManifest {
 public:
  explicit RunManifest(const RunConfig& config) : path_(config.run_dir() / "run_manifest.json") {
    std::error_code ec;
    if (fs::exists(path_, ec)) {
      try {
        doc_ = json::parse(io::read_file(path_));
      } catch (const std::exception&) {
        doc_ = json::object();
      }
    }
    if (!doc_.is_object()) doc_ = json::object();
    doc_["run_id"] = config.run_id;
    doc_["tool_version"] = kToolVersion;
    doc_["config"] = config.snapshot;
    if (!doc_.contains("stages")) doc_["stages"] = json::object();
  }

  const fs::path& path() const { return path_; }
  const json& doc() const { return doc_; }

  void begin_stage(const std::string& stage, const std::map<std::string, fs::path>& inputs) {
    json sums = json::object();
    for (const auto& [name, p] : inputs) sums[name] = file_checksum(p);
    auto& s = doc_["stages"][stage];
    s = {{"started_at", ingestion::utc_now_iso()}, {"status", "running"}, {"input_checksums", sums}};
    started_[stage] = std::chrono::steady_clock::now();
    save();
  }

  void end_stage(const std::string& stage, const std::string& status, const json& details = json::object()) {
    auto& s = doc_["stages"][stage];
    s["finished_at"] = ingestion::utc_now_iso();
    s["status"] = status;
    if (auto it = started_.find(stage); it != started_.end()) {
      s["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - it->second).count();
    }
    if (!details.empty()) s["details"] = details;
    save();
  }

 private:
  void save() const { io::write_file_atomic(path_, doc_.dump(2) + "\n"); }

  fs::path path_;
  json doc_ = json::object();
  std::map<std::string, std::chrono::steady_clock::time_point> started_;
};

}  // namespace cfh::pipeline
