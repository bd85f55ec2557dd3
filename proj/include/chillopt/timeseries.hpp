// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "chillopt/timestamp.hpp"

namespace chillopt {

// Uniform-interval series. Gaps are explicit absent slots, never skipped
// rows, so index i always corresponds to start + i * step_minutes.
template <typename R>
struct TimeSeries {
  Timestamp start;
  int step_minutes = 15;
  std::vector<std::optional<R>> records;

  std::size_t size() const { return records.size(); }

  Timestamp time_at(std::size_t i) const {
    return start.plus_minutes(static_cast<std::int64_t>(i) * step_minutes);
  }

  void push(R value) { records.push_back(std::move(value)); }
  void push_absent() { records.push_back(std::nullopt); }
};

using ScalarSeries = TimeSeries<double>;

// Throws unless the series is non-empty, its step is a positive divisor of
// an hour, and the start instant sits on a step boundary.
template <typename R>
void validate_series(const TimeSeries<R>& s) {
  if (s.records.empty()) throw std::invalid_argument("empty input");
  if (s.step_minutes <= 0 || 60 % s.step_minutes != 0)
    throw std::invalid_argument("bad step_minutes");
  if (s.start.minutes_since_epoch() % s.step_minutes != 0)
    throw std::invalid_argument("start not aligned to step");
}

// True when the two series cover the same instants slot for slot.
template <typename A, typename B>
bool aligned(const TimeSeries<A>& a, const TimeSeries<B>& b) {
  return a.start == b.start && a.step_minutes == b.step_minutes &&
         a.records.size() == b.records.size();
}

enum class Granularity { daily, monthly };

// Calendar-bucket aggregate. Buckets are not uniform in minutes (months
// differ in length), hence a separate type rather than TimeSeries.
struct AggPoint {
  Timestamp bucket_start;
  std::optional<double> value;
};

struct AggSeries {
  Granularity granularity = Granularity::daily;
  std::vector<AggPoint> points;

  std::size_t size() const { return points.size(); }
};

// Mean of present records per calendar day or month; buckets with no
// present records stay absent. Covers every bucket between the first and
// last slot inclusive.
AggSeries resample_mean(const ScalarSeries& series, Granularity granularity);

}  // namespace chillopt
