#pragma once

#include <stdexcept>
#include <string>

namespace drugbus {

/// Transport-independent response produced by request handlers.
struct HttpResponse {
  int status = 200;
  std::string content_type;
  std::string body;
};

inline constexpr const char* kXmlContentType = "application/xml";
inline constexpr const char* kJsonContentType = "application/json";

/// Raised when a server cannot bind its listen address (typically port in use).
class ListenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace drugbus
