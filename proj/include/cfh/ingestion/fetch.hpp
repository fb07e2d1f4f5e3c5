#pragma once

#include <chrono>
#include <ctime>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "cfh/ingestion/html_extract.hpp"
#include "cfh/ingestion/records.hpp"
#include "cfh/net/http.hpp"

namespace cfh::ingestion {

struct ExtractionConfig {
  std::size_t max_chars = 20000;  // bytes of UTF-8
  std::size_t min_chars = 200;
  int timeout_ms = 30000;
};

struct FetchConfig {
  std::size_t concurrency = 8;
  int politeness_ms = 500;  // minimum gap between requests to one host
  ExtractionConfig extraction;
};

inline std::string utc_now_iso() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

using TimestampFn = std::function<std::string()>;

inline Article fetch_article(const std::string& url, net::HttpTransport& http, const ExtractionConfig& config = {},
                             const TimestampFn& now = utc_now_iso) {
  if (!text::starts_with_icase(url, "http://") && !text::starts_with_icase(url, "https://"))
    throw Error(ErrorKind::InvalidArgument, "not an absolute http(s) URL: " + url);
  net::HttpResponse resp;
  try {
    resp = http.get(url, {}, config.timeout_ms);
  } catch (const net::TransportError& e) {
    throw FetchError(0, e.what());
  }
  if (resp.status < 200 || resp.status >= 300)
    throw FetchError(resp.status, "HTTP " + std::to_string(resp.status) + " for " + url);

  auto doc = extract_html(resp.body);
  Article a;
  a.url = url;
  a.fetched_at = now();
  a.title = std::move(doc.title);
  a.body = text::truncate_utf8(doc.body, config.max_chars);
  if (a.body.size() < config.min_chars)
    throw Error(ErrorKind::EmptyBody, url + ": extracted " + std::to_string(a.body.size()) + " chars, need " +
                                          std::to_string(config.min_chars));
  return a;
}

struct FetchFailure {
  std::string url;
  std::string reason;
};

struct FetchBatchResult {
  std::vector<Article> articles;  // sorted by URL
  std::vector<FetchFailure> failures;  // sorted by URL
};

/// Fetches every URL with bounded parallelism and a per-host politeness delay.
/// Output is keyed and sorted by URL so it does not depend on completion order.
inline FetchBatchResult fetch_articles(const std::map<std::string, std::vector<Date>>& urls,
                                       net::HttpTransport& http, const FetchConfig& config = {},
                                       const TimestampFn& now = utc_now_iso) {
  std::vector<const std::pair<const std::string, std::vector<Date>>*> work;
  for (const auto& entry : urls) work.push_back(&entry);

  std::mutex mu;
  std::size_t next = 0;
  std::map<std::string, std::chrono::steady_clock::time_point> host_ready;
  std::map<std::string, Article> ok;
  std::map<std::string, std::string> failed;

  auto worker = [&] {
    while (true) {
      const std::pair<const std::string, std::vector<Date>>* item = nullptr;
      std::chrono::steady_clock::time_point slot;
      {
        std::lock_guard lock(mu);
        if (next >= work.size()) return;
        item = work[next++];
        std::string host;
        try {
          host = net::url_host(item->first);
        } catch (const std::exception&) {
          host = item->first;
        }
        const auto now_tp = std::chrono::steady_clock::now();
        auto& ready = host_ready[host];
        slot = std::max(now_tp, ready);
        ready = slot + std::chrono::milliseconds(config.politeness_ms);
      }
      std::this_thread::sleep_until(slot);
      try {
        Article a = fetch_article(item->first, http, config.extraction, now);
        a.origin_event_dates = item->second;
        std::sort(a.origin_event_dates.begin(), a.origin_event_dates.end());
        std::lock_guard lock(mu);
        ok.emplace(item->first, std::move(a));
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        failed.emplace(item->first, e.what());
      }
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(config.concurrency, work.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  FetchBatchResult out;
  for (auto& [_, a] : ok) out.articles.push_back(std::move(a));
  for (auto& [url, why] : failed) out.failures.push_back({url, why});
  return out;
}

}  // namespace cfh::ingestion
