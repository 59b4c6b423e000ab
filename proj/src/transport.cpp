#include "drugbus/transport.hpp"

#include <httplib.h>

#include "drugbus/text.hpp"

namespace drugbus {

namespace {

class HttpTransport final : public Transport {
 public:
  FetchResult get(const std::string& url, std::chrono::milliseconds timeout) const override {
    FetchResult result;
    const auto parts = parse_url(url);
    if (!parts || parts->scheme != "http") {
      result.failure = FetchFailure::connect;
      result.detail = "unsupported URL '" + url + "'";
      return result;
    }
    httplib::Client client(parts->host, parts->port);
    client.set_url_encode(false);
    client.set_keep_alive(false);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Get(parts->path.empty() ? "/" : parts->path);
    if (!res) {
      const auto err = res.error();
      const auto elapsed = std::chrono::steady_clock::now() - start;
      const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             (err == httplib::Error::Read && elapsed >= timeout * 9 / 10);
      if (timed_out) {
        result.failure = FetchFailure::timeout;
      } else if (err == httplib::Error::Connection || err == httplib::Error::BindIPAddress) {
        result.failure = FetchFailure::connect;
      } else {
        result.failure = FetchFailure::bad_response;
      }
      result.detail = httplib::to_string(err);
      return result;
    }
    result.status = res->status;
    result.body = std::move(res->body);
    return result;
  }
};

}  // namespace

std::string_view to_string(FetchFailure failure) {
  switch (failure) {
    case FetchFailure::none: return "none";
    case FetchFailure::timeout: return "timeout";
    case FetchFailure::connect: return "connect";
    case FetchFailure::bad_response: return "bad_response";
  }
  return "unknown";
}

std::optional<UrlParts> parse_url(std::string_view url) {
  const auto sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;
  UrlParts parts;
  parts.scheme = text::to_lower(url.substr(0, sep));
  for (char c : parts.scheme) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
    if (!ok) return std::nullopt;
  }
  if (parts.scheme[0] < 'a' || parts.scheme[0] > 'z') return std::nullopt;

  auto rest = url.substr(sep + 3);
  const auto slash = rest.find('/');
  auto authority = rest.substr(0, slash);
  auto path = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash);
  if (authority.empty() || authority.find_first_of(" \t@?#|") != std::string_view::npos) {
    return std::nullopt;
  }
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    const auto port_text = authority.substr(colon + 1);
    if (port_text.empty() || port_text.size() > 5 ||
        port_text.find_first_not_of("0123456789") != std::string_view::npos) {
      return std::nullopt;
    }
    parts.port = std::stoi(std::string(port_text));
    if (parts.port == 0 || parts.port > 65535) return std::nullopt;
    authority = authority.substr(0, colon);
  } else {
    parts.port = parts.scheme == "https" ? 443 : 80;
  }
  if (authority.empty()) return std::nullopt;
  parts.host = std::string(authority);
  while (!path.empty() && path.back() == '/') path.remove_suffix(1);
  if (path.find_first_of(" \t\r\n|") != std::string_view::npos) return std::nullopt;
  parts.path = std::string(path);
  return parts;
}

std::shared_ptr<Transport> make_http_transport() { return std::make_shared<HttpTransport>(); }

}  // namespace drugbus
