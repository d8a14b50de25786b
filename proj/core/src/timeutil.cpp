#include "paxsat/timeutil.hpp"

#include <cstdio>
#include <stdexcept>

namespace paxsat {

// Howard Hinnant's civil-days algorithms (public domain).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

Date make_date(int y, int m, int d) {
  return Date{static_cast<std::int32_t>(days_from_civil(y, m, d))};
}

Minute make_minute(int y, int m, int d, int hh, int mm) {
  return Minute{days_from_civil(y, m, d) * 1440 + hh * 60 + mm};
}

int year_of(Date d) { return civil_from_days(d.days).year; }
int month_of(Date d) { return civil_from_days(d.days).month; }

std::string format_date(Date d) {
  CivilDate c = civil_from_days(d.days);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
  return buf;
}

std::string format_minute(Minute t) {
  CivilDate c = civil_from_days(date_of(t).days);
  int mod = minute_of_day(t);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d", c.year, c.month, c.day, mod / 60,
                mod % 60);
  return buf;
}

namespace {

bool all_digits(const std::string& s, size_t from, size_t to) {
  for (size_t i = from; i < to; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

}  // namespace

Date parse_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !all_digits(s, 0, 4) ||
      !all_digits(s, 5, 7) || !all_digits(s, 8, 10))
    throw std::runtime_error("bad date '" + s + "', expected YYYY-MM-DD");
  int y = std::stoi(s.substr(0, 4));
  int m = std::stoi(s.substr(5, 2));
  int d = std::stoi(s.substr(8, 2));
  if (m < 1 || m > 12 || d < 1 || d > 31)
    throw std::runtime_error("bad date '" + s + "'");
  return make_date(y, m, d);
}

Minute parse_minute(const std::string& s) {
  if (s.size() != 16 || s[10] != ' ' || s[13] != ':' || !all_digits(s, 11, 13) ||
      !all_digits(s, 14, 16))
    throw std::runtime_error("bad timestamp '" + s + "', expected YYYY-MM-DD HH:MM");
  Date d = parse_date(s.substr(0, 10));
  int hh = std::stoi(s.substr(11, 2));
  int mm = std::stoi(s.substr(14, 2));
  if (hh > 23 || mm > 59) throw std::runtime_error("bad timestamp '" + s + "'");
  return Minute{static_cast<std::int64_t>(d.days) * 1440 + hh * 60 + mm};
}

}  // namespace paxsat
