// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "chillopt/rng.hpp"

namespace chillopt {

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("empty input");
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

MapeResult mape(const ScalarSeries& actual, const ScalarSeries& forecast,
                const MapeOptions& opt) {
  validate_series(actual);
  validate_series(forecast);
  if (!aligned(actual, forecast))
    throw std::invalid_argument("misaligned series");

  struct DayAcc {
    double err_sum = 0.0;
    std::size_t compared = 0;
    std::size_t slots = 0;
  };
  std::map<std::int64_t, DayAcc> days;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    auto& acc = days[actual.time_at(i).day_index()];
    ++acc.slots;
    if (!actual.records[i] || !forecast.records[i]) continue;
    const double a = *actual.records[i];
    if (a == 0.0) {
      ++excluded;
      continue;
    }
    acc.err_sum += std::abs(a - *forecast.records[i]) / std::abs(a);
    ++acc.compared;
  }

  std::vector<double> daily;
  daily.reserve(days.size());
  for (const auto& [day, acc] : days) {
    if (acc.compared == 0) continue;
    const double present = static_cast<double>(acc.compared) /
                           static_cast<double>(acc.slots);
    if (present < opt.min_day_fraction) continue;
    daily.push_back(acc.err_sum / static_cast<double>(acc.compared) * 100.0);
  }
  if (daily.empty()) throw std::runtime_error("no comparable points");

  MapeResult res;
  res.n_days = daily.size();
  res.n_excluded = excluded;
  res.ci_level = opt.ci_level;
  double sum = 0.0;
  for (double d : daily) sum += d;
  res.mape_pct = sum / static_cast<double>(daily.size());

  if (daily.size() == 1) return res;  // halfwidth stays 0

  Rng rng(opt.bootstrap_seed);
  std::vector<double> means(static_cast<std::size_t>(opt.bootstrap_resamples));
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < daily.size(); ++i)
      s += daily[rng.uniform_int(daily.size())];
    m = s / static_cast<double>(daily.size());
  }
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - opt.ci_level) / 2.0;
  const double lo = percentile_sorted(means, alpha);
  const double hi = percentile_sorted(means, 1.0 - alpha);
  res.ci_halfwidth_pct = (hi - lo) / 2.0;
  return res;
}

namespace {

double pearson_impl(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("misaligned series");
  if (x.size() < 3) throw std::invalid_argument("need at least 3 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::runtime_error("degenerate series");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  return pearson_impl(x, y);
}

double pearson_corr(const ScalarSeries& x, const ScalarSeries& y) {
  validate_series(x);
  validate_series(y);
  if (!aligned(x, y)) throw std::invalid_argument("misaligned series");
  std::vector<double> xs, ys;
  xs.reserve(x.size());
  ys.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x.records[i] || !y.records[i]) continue;
    xs.push_back(*x.records[i]);
    ys.push_back(*y.records[i]);
  }
  return pearson_impl(xs, ys);
}

}  // namespace chillopt
