// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "chillopt/metrics.hpp"
#include "chillopt/mlp.hpp"
#include "chillopt/sim.hpp"

namespace chillopt {

// Aggregate-level linear benchmark: target regressed on temperature after
// both are resampled to the chosen granularity.
struct LinearModel {
  double slope = 0.0;
  double intercept = 0.0;
  Granularity granularity = Granularity::daily;
  double fit_r2 = 0.0;
};

LinearModel fit_linear(const ScalarSeries& temps, const ScalarSeries& targets,
                       Granularity granularity);

// slope * temp + intercept, floored at 0.
double predict_linear(const LinearModel& m, double temp_aggregate);

enum class TargetKind { cooling, power };

// 15-minute profile forecaster: windowed nonlinear autoregression with one
// hidden tanh layer. Lag features stand in for recurrence; the largest lag
// defines the history window a forecast needs.
//
// Feature row layout, in input_scaler and net order:
//   [dry_bulb_c, rel_humidity_pct, sin(2*pi*h/24), cos(2*pi*h/24),
//    weekday flag, one slot per lag]
// where h is the fractional hour of day. Targets are standardized with
// target_mean/target_scale; raw predictions are floored at 0.
struct ProfileForecaster {
  TargetKind target = TargetKind::cooling;
  std::vector<int> lags;  // intervals back, ascending
  Mlp net;
  Scaler input_scaler;
  double target_mean = 0.0;
  double target_scale = 1.0;
  MapeResult holdout_mape;
  // Span of every record the training step saw, for leakage checks.
  Timestamp train_begin, train_end;

  int lag_window() const { return lags.empty() ? 0 : lags.back(); }
};

using CoolingProfile = ScalarSeries;  // forecast values, all >= 0

// Trains on the chronologically first 70 percent and scores a day-by-day
// roll-forward on the remaining 30, which becomes holdout_mape.
ProfileForecaster fit_profile(const OperationSeries& history, TargetKind target,
                              const MlpHyperparams& hp = {});

// Multi-step forecast that feeds its own predictions back into the lag
// window. recent_history must end exactly one step before the forecast
// weather begins and supply the full lag window.
CoolingProfile forecast_profile(const ProfileForecaster& fc,
                                const WeatherSeries& weather_forecast,
                                const OperationSeries& recent_history);

// Day-by-day 24 h roll-forward over the holdout, scored with mape. Refuses
// holdouts overlapping the training span.
MapeResult evaluate_forecaster(const ProfileForecaster& fc,
                               const OperationSeries& holdout);

void save_forecaster(const std::string& path, const ProfileForecaster& fc);
ProfileForecaster load_forecaster(const std::string& path);

}  // namespace chillopt
