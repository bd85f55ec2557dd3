// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/records.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chillopt {

double wet_bulb_stull(double t, double rh) {
  const double wb = t * std::atan(0.151977 * std::sqrt(rh + 8.313659)) +
                    std::atan(t + rh) - std::atan(rh - 1.676331) +
                    0.00391838 * std::pow(rh, 1.5) * std::atan(0.023101 * rh) -
                    4.686035;
  return std::min(wb, t);
}

WeatherRecord make_weather(double dry_bulb_c, double rel_humidity_pct) {
  if (!(rel_humidity_pct >= 0.0 && rel_humidity_pct <= 100.0))
    throw std::invalid_argument("rel_humidity_pct out of range");
  return {dry_bulb_c, rel_humidity_pct,
          wet_bulb_stull(dry_bulb_c, rel_humidity_pct)};
}

}  // namespace chillopt
