#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace drugbus {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

/// RFC 3339 UTC, e.g. "2026-10-18T09:30:00.123456Z"; the fraction is omitted
/// when zero.
std::string format_rfc3339(Timestamp t);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.f{1,6}](Z|+00:00)".
std::optional<Timestamp> parse_rfc3339(std::string_view s);

inline Timestamp now_utc() {
  return std::chrono::time_point_cast<std::chrono::microseconds>(std::chrono::system_clock::now());
}

}  // namespace drugbus
