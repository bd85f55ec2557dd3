// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/timeseries.hpp"

namespace chillopt {

namespace {

Timestamp day_start(std::int64_t day_index) {
  return Timestamp::from_minutes(day_index * 1440);
}

Timestamp month_start(std::int64_t month_key) {
  const auto y = static_cast<int>(month_key / 12);
  const auto m = static_cast<int>(month_key % 12) + 1;
  return Timestamp::civil(y, m, 1);
}

}  // namespace

AggSeries resample_mean(const ScalarSeries& series, Granularity granularity) {
  validate_series(series);

  const bool daily = granularity == Granularity::daily;
  auto key_of = [&](const Timestamp& t) {
    return daily ? t.day_index() : t.month_key();
  };

  const std::int64_t first_key = key_of(series.time_at(0));
  const std::int64_t last_key = key_of(series.time_at(series.size() - 1));

  AggSeries out;
  out.granularity = granularity;
  out.points.reserve(static_cast<std::size_t>(last_key - first_key + 1));
  for (std::int64_t k = first_key; k <= last_key; ++k)
    out.points.push_back({daily ? day_start(k) : month_start(k), std::nullopt});

  std::vector<double> sums(out.points.size(), 0.0);
  std::vector<std::size_t> counts(out.points.size(), 0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series.records[i]) continue;
    const auto b = static_cast<std::size_t>(key_of(series.time_at(i)) -
                                            first_key);
    sums[b] += *series.records[i];
    ++counts[b];
  }
  for (std::size_t b = 0; b < out.points.size(); ++b)
    if (counts[b] > 0)
      out.points[b].value = sums[b] / static_cast<double>(counts[b]);
  return out;
}

}  // namespace chillopt
