// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "chillopt/timeseries.hpp"

namespace chillopt {

struct MapeResult {
  double mape_pct = 0.0;
  double ci_halfwidth_pct = 0.0;
  double ci_level = 0.95;
  std::size_t n_days = 0;
  // Compared points dropped because the actual value was zero.
  std::size_t n_excluded = 0;
};

struct MapeOptions {
  // The bootstrap is the only stochastic step; a fixed seed keeps reports
  // reproducible run to run.
  std::uint64_t bootstrap_seed = 0x5eed0fc1;
  int bootstrap_resamples = 1000;
  double ci_level = 0.95;
  // Days where fewer than this fraction of slots have both values present
  // are dropped from the daily average.
  double min_day_fraction = 0.5;
};

// Daily-first MAPE: per-interval absolute percentage errors are averaged
// within each calendar day, then across days. The confidence halfwidth is a
// percentile bootstrap over the daily values.
MapeResult mape(const ScalarSeries& actual, const ScalarSeries& forecast,
                const MapeOptions& opt = {});

// Pearson product-moment correlation over slots where both values are
// present; needs at least 3 such pairs and nonzero variance on both sides.
double pearson_corr(const ScalarSeries& x, const ScalarSeries& y);
double pearson_corr(std::span<const double> x, std::span<const double> y);

// q in [0,1]; linear interpolation between order statistics of a sorted
// sample. Exposed for the savings bootstrap as well.
double percentile_sorted(std::span<const double> sorted, double q);

}  // namespace chillopt
