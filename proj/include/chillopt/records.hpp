// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "chillopt/timeseries.hpp"

namespace chillopt {

struct WeatherRecord {
  double dry_bulb_c = 0.0;
  double rel_humidity_pct = 0.0;
  double wet_bulb_c = 0.0;
};

struct EnergyRecord {
  double power_kw = 0.0;
  double cooling_kw = 0.0;
};

using WeatherSeries = TimeSeries<WeatherRecord>;
using EnergySeries = TimeSeries<EnergyRecord>;

// Stull's empirical wet-bulb fit; valid for ordinary ambient conditions.
// Result is clamped to the dry-bulb temperature, which the fit can slightly
// overshoot near saturation.
double wet_bulb_stull(double dry_bulb_c, double rel_humidity_pct);

// Builds a record with the wet bulb filled in. Humidity must lie in
// [0, 100].
WeatherRecord make_weather(double dry_bulb_c, double rel_humidity_pct);

}  // namespace chillopt
