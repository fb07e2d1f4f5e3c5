#pragma once

// Network transport backed by cpp-httplib. Kept out of the umbrella header so
// only translation units that really talk to the network pay for httplib.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "cfh/net/http.hpp"

namespace cfh::net {

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::string user_agent = "cfh/1.0") : user_agent_(std::move(user_agent)) {}

  HttpResponse get(const std::string& url, const HttpHeaders& headers, int timeout_ms) override {
    auto [origin, path] = split_url(url);
    auto client = make_client(origin, timeout_ms);
    auto result = client.Get(path, to_httplib(headers));
    return convert(result, url);
  }

  HttpResponse post(const std::string& url, const HttpHeaders& headers, const std::string& body,
                    const std::string& content_type, int timeout_ms) override {
    auto [origin, path] = split_url(url);
    auto client = make_client(origin, timeout_ms);
    auto result = client.Post(path, to_httplib(headers), body, content_type);
    return convert(result, url);
  }

 private:
  httplib::Client make_client(const std::string& origin, int timeout_ms) const {
    httplib::Client client(origin);
    const auto sec = timeout_ms / 1000;
    const auto usec = (timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    client.set_follow_location(true);
    client.enable_server_certificate_verification(true);
    return client;
  }

  httplib::Headers to_httplib(const HttpHeaders& headers) const {
    httplib::Headers out{{"User-Agent", user_agent_}};
    for (const auto& [k, v] : headers) out.emplace(k, v);
    return out;
  }

  static HttpResponse convert(const httplib::Result& result, const std::string& url) {
    if (!result) {
      // The URL is safe to report; request headers (which may hold secrets) are not.
      throw TransportError("request to " + split_url(url).first + " failed: " + httplib::to_string(result.error()));
    }
    HttpResponse out;
    out.status = result->status;
    out.body = result->body;
    for (const auto& [k, v] : result->headers) out.headers[k] = v;
    return out;
  }

  std::string user_agent_;
};

}  // namespace cfh::net
