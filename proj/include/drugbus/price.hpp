#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace drugbus {

/// Non-negative fixed-point money amount with exactly four fractional digits,
/// stored as an integer count of ten-thousandths. No currency is attached.
class Price {
 public:
  static constexpr int kScale = 10000;
  static constexpr int kDigits = 4;

  constexpr Price() = default;

  static constexpr Price from_units(std::int64_t ten_thousandths) {
    Price p;
    p.units_ = ten_thousandths;
    return p;
  }

  /// Accepts `D+` or `D+.D*` (ASCII digits, no sign, no separators). Up to four
  /// fractional digits are significant; further digits must all be zero.
  static std::optional<Price> parse(std::string_view s) {
    if (s.empty()) return std::nullopt;
    const auto dot = s.find('.');
    const auto whole = s.substr(0, dot);
    const auto frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty()) return std::nullopt;
    if (dot != std::string_view::npos && frac.empty()) return std::nullopt;

    constexpr auto kMax = std::numeric_limits<std::int64_t>::max() / kScale - 1;
    std::int64_t int_part = 0;
    for (char c : whole) {
      if (c < '0' || c > '9') return std::nullopt;
      int_part = int_part * 10 + (c - '0');
      if (int_part > kMax) return std::nullopt;
    }
    std::int64_t frac_part = 0;
    for (std::size_t i = 0; i < frac.size(); ++i) {
      const char c = frac[i];
      if (c < '0' || c > '9') return std::nullopt;
      if (i < kDigits) {
        frac_part = frac_part * 10 + (c - '0');
      } else if (c != '0') {
        return std::nullopt;
      }
    }
    for (auto i = frac.size(); i < static_cast<std::size_t>(kDigits); ++i) frac_part *= 10;
    return from_units(int_part * kScale + frac_part);
  }

  constexpr std::int64_t units() const { return units_; }

  std::string str() const {
    std::string frac = std::to_string(units_ % kScale);
    frac.insert(0, kDigits - frac.size(), '0');
    return std::to_string(units_ / kScale) + "." + frac;
  }

  friend constexpr auto operator<=>(const Price&, const Price&) = default;

 private:
  std::int64_t units_ = 0;
};

}  // namespace drugbus
