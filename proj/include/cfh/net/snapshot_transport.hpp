#pragma once

#include <filesystem>
#include <map>
#include <mutex>

#include "cfh/io.hpp"
#include "cfh/net/http.hpp"
#include "cfh/text.hpp"

namespace cfh::net {

/// Offline transport serving GET requests from a directory snapshot.
///
/// `index.tsv` holds one `url<TAB>status<TAB>relative-file` line per page;
/// unknown URLs answer 404 and POSTs fail at the transport level.
class SnapshotTransport final : public HttpTransport {
 public:
  explicit SnapshotTransport(std::filesystem::path dir) : dir_(std::move(dir)) {
    const auto index = io::read_file(dir_ / "index.tsv");
    for (auto line : text::split(index, '\n')) {
      line = text::trim(line);
      if (line.empty() || line.front() == '#') continue;
      auto cols = text::split(line, '\t');
      if (cols.size() != 3) throw TransportError("malformed snapshot index line: " + std::string(line));
      entries_[std::string(cols[0])] = Entry{std::stoi(std::string(cols[1])), std::string(cols[2])};
    }
  }

  HttpResponse get(const std::string& url, const HttpHeaders&, int) override {
    {
      std::lock_guard lock(mu_);
      ++gets_;
    }
    auto it = entries_.find(url);
    if (it == entries_.end()) return HttpResponse{404, "not found", {}};
    HttpResponse r;
    r.status = it->second.status;
    if (!it->second.file.empty() && it->second.file != "-") r.body = io::read_file(dir_ / it->second.file);
    return r;
  }

  HttpResponse post(const std::string& url, const HttpHeaders&, const std::string&, const std::string&,
                    int) override {
    throw TransportError("snapshot transport cannot POST to " + url);
  }

  std::size_t get_count() const {
    std::lock_guard lock(mu_);
    return gets_;
  }

 private:
  struct Entry {
    int status;
    std::string file;
  };
  std::filesystem::path dir_;
  std::map<std::string, Entry> entries_;
  mutable std::mutex mu_;
  std::size_t gets_ = 0;
};

}  // namespace cfh::net
