// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace chillopt {

// Calendar instant at minute resolution, UTC only. Stored as minutes since
// 1970-01-01T00:00Z so interval arithmetic is plain integer math; calendar
// fields are derived on demand.
class Timestamp {
 public:
  Timestamp() = default;

  static Timestamp from_minutes(std::int64_t minutes) {
    Timestamp t;
    t.minutes_ = minutes;
    return t;
  }

  // month is 1..12, day 1..31; validated.
  static Timestamp civil(int year, int month, int day, int hour = 0,
                         int minute = 0);

  // Accepts "YYYY-MM-DDTHH:MM", optionally with ":SS" (seconds must be 00)
  // and an optional trailing "Z". A space may stand in for the 'T'.
  static Timestamp parse(std::string_view iso);

  std::string to_string() const;  // "YYYY-MM-DDTHH:MM:00Z"

  std::int64_t minutes_since_epoch() const { return minutes_; }

  // Floor division so pre-epoch instants land on the correct day.
  std::int64_t day_index() const {
    std::int64_t d = minutes_ / 1440;
    if (minutes_ % 1440 < 0) --d;
    return d;
  }

  int year() const;
  int month() const;   // 1..12
  int day() const;     // 1..31
  int hour() const;    // 0..23
  int minute() const;  // 0..59
  int weekday() const;           // 0 = Monday .. 6 = Sunday
  std::int64_t month_key() const;  // year * 12 + (month - 1)

  Timestamp plus_minutes(std::int64_t m) const {
    return from_minutes(minutes_ + m);
  }

  auto operator<=>(const Timestamp&) const = default;

 private:
  std::int64_t minutes_ = 0;
};

// Days between 1970-01-01 and year/month/day (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

}  // namespace chillopt
