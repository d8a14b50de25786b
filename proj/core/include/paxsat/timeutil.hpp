#pragma once

#include <cstdint>
#include <string>

namespace paxsat {

/// Minute-resolution timestamp: minutes since 1970-01-01 00:00 (no timezone;
/// all survey/flight times are local airport clock).
struct Minute {
  std::int64_t v = 0;

  friend auto operator<=>(const Minute&, const Minute&) = default;
  Minute operator+(std::int64_t m) const { return {v + m}; }
  Minute operator-(std::int64_t m) const { return {v - m}; }
  std::int64_t operator-(const Minute& o) const { return v - o.v; }
};

/// Calendar date as days since 1970-01-01.
struct Date {
  std::int32_t days = 0;

  friend auto operator<=>(const Date&, const Date&) = default;
};

struct CivilDate {
  int year;
  int month;  // 1..12
  int day;    // 1..31
};

std::int64_t days_from_civil(int y, int m, int d);
CivilDate civil_from_days(std::int64_t z);

Date make_date(int y, int m, int d);
Minute make_minute(int y, int m, int d, int hh, int mm);

inline Date date_of(Minute t) {
  // floor division for times before the epoch
  std::int64_t d = t.v >= 0 ? t.v / 1440 : (t.v - 1439) / 1440;
  return Date{static_cast<std::int32_t>(d)};
}
inline int minute_of_day(Minute t) {
  std::int64_t m = t.v % 1440;
  return static_cast<int>(m < 0 ? m + 1440 : m);
}
inline int hour_of_day(Minute t) { return minute_of_day(t) / 60; }
inline Minute floor_hour(Minute t) { return Minute{t.v - minute_of_day(t) % 60}; }

int year_of(Date d);
int month_of(Date d);

/// "YYYY-MM-DD"
std::string format_date(Date d);
/// "YYYY-MM-DD HH:MM"
std::string format_minute(Minute t);

/// Throws std::runtime_error on malformed input.
Date parse_date(const std::string& s);
Minute parse_minute(const std::string& s);

}  // namespace paxsat
