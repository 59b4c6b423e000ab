#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace drugbus {

enum class FetchFailure { none, timeout, connect, bad_response };

std::string_view to_string(FetchFailure failure);

struct FetchResult {
  FetchFailure failure = FetchFailure::none;
  int status = 0;
  std::string body;
  std::string detail;  // human-readable reason when failure != none

  bool ok() const { return failure == FetchFailure::none; }
};

/// Outbound GET used by the bus to reach providers. Implementations must be
/// safe to call from many threads at once.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual FetchResult get(const std::string& url, std::chrono::milliseconds timeout) const = 0;
};

struct UrlParts {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;  // no trailing slash; empty for the root
};

/// Splits an absolute URL; nullopt if it lacks a scheme or host.
std::optional<UrlParts> parse_url(std::string_view url);

/// Plain HTTP/1.1 client transport.
std::shared_ptr<Transport> make_http_transport();

}  // namespace drugbus
