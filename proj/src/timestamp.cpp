// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/timestamp.hpp"

#include <cstdio>
#include <stdexcept>

namespace chillopt {

namespace {

// Euclidean floor division/modulo; C++ integer division truncates toward
// zero, which is wrong for pre-epoch instants.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

[[noreturn]] void bad_timestamp(std::string_view s) {
  throw std::invalid_argument("bad timestamp: " + std::string(s));
}

}  // namespace

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  year = static_cast<int>(y + (month <= 2));
}

Timestamp Timestamp::civil(int year, int month, int day, int hour,
                           int minute) {
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) ||
      hour < 0 || hour > 23 || minute < 0 || minute > 59)
    throw std::invalid_argument("bad civil date");
  return from_minutes(days_from_civil(year, month, day) * 1440 + hour * 60 +
                      minute);
}

Timestamp Timestamp::parse(std::string_view s) {
  // Shortest accepted form is "YYYY-MM-DDTHH:MM" (16 chars).
  if (s.size() < 16) bad_timestamp(s);
  auto digits = [&](std::size_t pos, int n) -> int {
    int v = 0;
    for (int i = 0; i < n; ++i) {
      const char c = s[pos + i];
      if (c < '0' || c > '9') bad_timestamp(s);
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':')
    bad_timestamp(s);
  const int year = digits(0, 4);
  const int month = digits(5, 2);
  const int day = digits(8, 2);
  const int hour = digits(11, 2);
  const int minute = digits(14, 2);
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (pos + 3 > s.size() || digits(pos + 1, 2) != 0) bad_timestamp(s);
    pos += 3;
  }
  if (pos < s.size() && s[pos] == 'Z') ++pos;
  if (pos != s.size()) bad_timestamp(s);
  try {
    return civil(year, month, day, hour, minute);
  } catch (const std::invalid_argument&) {
    bad_timestamp(s);
  }
}

std::string Timestamp::to_string() const {
  int y, mo, d;
  civil_from_days(day_index(), y, mo, d);
  const std::int64_t rem = floor_mod(minutes_, 1440);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:00Z", y, mo, d,
                static_cast<int>(rem / 60), static_cast<int>(rem % 60));
  return buf;
}

int Timestamp::year() const {
  int y, m, d;
  civil_from_days(day_index(), y, m, d);
  return y;
}

int Timestamp::month() const {
  int y, m, d;
  civil_from_days(day_index(), y, m, d);
  return m;
}

int Timestamp::day() const {
  int y, m, d;
  civil_from_days(day_index(), y, m, d);
  return d;
}

int Timestamp::hour() const {
  return static_cast<int>(floor_mod(minutes_, 1440) / 60);
}

int Timestamp::minute() const {
  return static_cast<int>(floor_mod(minutes_, 60));
}

int Timestamp::weekday() const {
  // 1970-01-01 (day 0) was a Thursday; shift so Monday maps to 0.
  return static_cast<int>(floor_mod(day_index() + 3, 7));
}

std::int64_t Timestamp::month_key() const {
  int y, m, d;
  civil_from_days(day_index(), y, m, d);
  return static_cast<std::int64_t>(y) * 12 + (m - 1);
}

}  // namespace chillopt
