#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace cfh::net {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;
};

using HttpHeaders = std::map<std::string, std::string>;

/// Raised for connection-level failures (DNS, refused, timeout) where no HTTP
/// status was received.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Blocking HTTP transport. Implementations must be safe to call from several
/// threads at once.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;

  virtual HttpResponse get(const std::string& url, const HttpHeaders& headers, int timeout_ms) = 0;
  virtual HttpResponse post(const std::string& url, const HttpHeaders& headers, const std::string& body,
                            const std::string& content_type, int timeout_ms) = 0;
};

/// Splits "https://host:port/path?q" into ("https://host:port", "/path?q").
inline std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("not an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string url_host(const std::string& url) {
  auto origin = split_url(url).first;
  return origin.substr(origin.find("://") + 3);
}

}  // namespace cfh::net
