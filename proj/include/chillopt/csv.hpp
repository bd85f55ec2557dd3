// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "chillopt/records.hpp"

namespace chillopt {

// Interval CSV schemas. One row per slot, timestamps ISO-8601 and strictly
// increasing with a uniform step; an absent slot keeps its timestamp and
// leaves every value field empty.
//
//   weather: timestamp,dry_bulb_c,rel_humidity_pct
//   energy:  timestamp,power_kw,cooling_kw
//
// Wet bulb is derived, so it is recomputed on read rather than stored.

void write_weather_csv(const std::string& path, const WeatherSeries& series);
WeatherSeries read_weather_csv(const std::string& path);

void write_energy_csv(const std::string& path, const EnergySeries& series);
EnergySeries read_energy_csv(const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace chillopt
