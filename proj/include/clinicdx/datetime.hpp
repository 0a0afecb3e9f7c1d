#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace clinicdx {

// All times are whole minutes from midnight; spans are whole minutes.
using Minutes = int;

inline constexpr Minutes kMinutesPerDay = 1440;

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;

  // Strict ISO-8601 calendar date (YYYY-MM-DD).
  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;
};

// 24h clock text ("H:MM", "HH:MM", or "HH:MM:SS") to minutes from
// midnight. Seconds are floored away. Anything else returns nullopt.
std::optional<Minutes> parse_clock(std::string_view text);

std::string format_clock(Minutes minutes_from_midnight);

// Non-negative decimal integer; nullopt on junk or overflow.
std::optional<int> parse_nonneg_int(std::string_view text);

}  // namespace clinicdx
