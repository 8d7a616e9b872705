#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace optrend {

// Calendar day in UTC, stored as days since 1970-01-01.
struct Day {
  std::int32_t serial = 0;

  constexpr Day() = default;
  constexpr explicit Day(std::int32_t s) : serial(s) {}

  constexpr auto operator<=>(const Day&) const = default;

  constexpr Day operator+(std::int32_t d) const { return Day{serial + d}; }
  constexpr Day operator-(std::int32_t d) const { return Day{serial - d}; }
  constexpr std::int32_t operator-(Day o) const { return serial - o.serial; }
  Day& operator++() {
    ++serial;
    return *this;
  }
};

namespace detail {

inline int parse_digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) throw std::invalid_argument("truncated date/time");
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') throw std::invalid_argument("non-digit in date/time");
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace detail

// Parses "YYYY-MM-DD".
inline Day parse_day(std::string_view s) {
  if (s.size() < 10 || s[4] != '-' || s[7] != '-')
    throw std::invalid_argument("bad date: " + std::string(s));
  using namespace std::chrono;
  const int y = detail::parse_digits(s, 0, 4);
  const int m = detail::parse_digits(s, 5, 2);
  const int d = detail::parse_digits(s, 8, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw std::invalid_argument("invalid date: " + std::string(s));
  return Day{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
}

inline std::string format_day(Day day) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day.serial}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

// Parses "YYYY-MM-DDTHH:MM:SSZ" (a trailing 'Z' is optional) into Unix seconds.
inline std::int64_t parse_timestamp(std::string_view s) {
  const Day day = parse_day(s);
  if (s.size() < 19 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':')
    throw std::invalid_argument("bad timestamp: " + std::string(s));
  const int hh = detail::parse_digits(s, 11, 2);
  const int mm = detail::parse_digits(s, 14, 2);
  const int ss = detail::parse_digits(s, 17, 2);
  if (hh > 23 || mm > 59 || ss > 60) throw std::invalid_argument("bad time of day: " + std::string(s));
  if (s.size() > 19 && !(s.size() == 20 && s[19] == 'Z'))
    throw std::invalid_argument("unsupported timestamp suffix: " + std::string(s));
  return std::int64_t{day.serial} * 86400 + hh * 3600 + mm * 60 + ss;
}

inline std::string format_timestamp(std::int64_t unix_seconds) {
  std::int64_t days = unix_seconds / 86400;
  std::int64_t rem = unix_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(rem / 3600),
                static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
  return format_day(Day{static_cast<std::int32_t>(days)}) + buf;
}

inline Day day_of(std::int64_t unix_seconds) {
  std::int64_t d = unix_seconds / 86400;
  if (unix_seconds % 86400 < 0) --d;
  return Day{static_cast<std::int32_t>(d)};
}

}  // namespace optrend
