#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "trendsurv/error.hpp"

namespace trendsurv {

// Calendar-day resolution throughout; no time zones, no sub-daily instants.
using Date = std::chrono::sys_days;

inline Date make_date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) {
    throw Error(Errc::bad_argument, "invalid calendar date");
  }
  return Date{ymd};
}

inline std::chrono::year_month_day to_ymd(Date d) { return std::chrono::year_month_day{d}; }

inline std::string format_date(Date d) {
  const auto ymd = to_ymd(d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

namespace detail {

inline bool read_digits(std::string_view text, std::size_t& pos, int max_digits, int& out) {
  int value = 0;
  int used = 0;
  while (used < max_digits && pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
    value = value * 10 + (text[pos] - '0');
    ++pos;
    ++used;
  }
  if (used == 0) return false;
  out = value;
  return true;
}

}  // namespace detail

// Minimal strptime-style parser: %Y %m %d plus literal characters.
// Returns nullopt on any mismatch or an impossible calendar date.
inline std::optional<Date> parse_date(std::string_view text,
                                      std::string_view pattern = "%Y-%m-%d") {
  int year = 0, month = 0, day = 0;
  bool saw_y = false, saw_m = false, saw_d = false;
  std::size_t tp = 0;
  for (std::size_t pp = 0; pp < pattern.size(); ++pp) {
    if (pattern[pp] == '%' && pp + 1 < pattern.size()) {
      const char token = pattern[++pp];
      bool ok = false;
      switch (token) {
        case 'Y': ok = detail::read_digits(text, tp, 4, year); saw_y = ok; break;
        case 'm': ok = detail::read_digits(text, tp, 2, month); saw_m = ok; break;
        case 'd': ok = detail::read_digits(text, tp, 2, day); saw_d = ok; break;
        default: return std::nullopt;
      }
      if (!ok) return std::nullopt;
    } else {
      if (tp >= text.size() || text[tp] != pattern[pp]) return std::nullopt;
      ++tp;
    }
  }
  if (tp != text.size() || !saw_y || !saw_m || !saw_d) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                                  std::chrono::day{unsigned(day)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

// Signed day count from a to b.
inline long days_between(Date a, Date b) { return (b - a).count(); }

inline std::string format_year_month(int year, unsigned month) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
  return buf;
}

}  // namespace trendsurv
