#include "clinicdx/datetime.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace clinicdx {
namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::optional<int> to_int(std::string_view s) {
  if (!all_digits(s)) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool is_leap(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30,
                                  31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return kDays[month - 1];
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  // Strictly YYYY-MM-DD.
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    return std::nullopt;
  }
  auto year = to_int(text.substr(0, 4));
  auto month = to_int(text.substr(5, 2));
  auto day = to_int(text.substr(8, 2));
  if (!year || !month || !day) return std::nullopt;
  if (*month < 1 || *month > 12) return std::nullopt;
  if (*day < 1 || *day > days_in_month(*year, *month)) return std::nullopt;
  return Date{*year, *month, *day};
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<Minutes> parse_clock(std::string_view text) {
  // HH:MM with optional :SS (seconds floored away); hour may be one digit.
  auto first_colon = text.find(':');
  if (first_colon == std::string_view::npos || first_colon < 1 ||
      first_colon > 2) {
    return std::nullopt;
  }
  std::string_view hour_part = text.substr(0, first_colon);
  std::string_view rest = text.substr(first_colon + 1);
  std::string_view minute_part = rest;
  if (auto colon = std::find(rest.begin(), rest.end(), ':');
      colon != rest.end()) {
    const auto second_colon = static_cast<std::size_t>(colon - rest.begin());
    minute_part = rest.substr(0, second_colon);
    std::string_view second_part = rest.substr(second_colon + 1);
    auto seconds = to_int(second_part);
    if (second_part.size() != 2 || !seconds || *seconds > 59) {
      return std::nullopt;
    }
  }
  if (minute_part.size() != 2) return std::nullopt;
  auto hours = to_int(hour_part);
  auto minutes = to_int(minute_part);
  if (!hours || !minutes || *hours > 23 || *minutes > 59) return std::nullopt;
  return *hours * 60 + *minutes;
}

std::string format_clock(Minutes minutes_from_midnight) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", minutes_from_midnight / 60,
                minutes_from_midnight % 60);
  return buf;
}

std::optional<int> parse_nonneg_int(std::string_view text) {
  return to_int(text);
}

}  // namespace clinicdx
