// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Measurement and verification. A baseline model learned on pre-change
// history is re-evaluated under the reporting period's weather, and the
// avoided energy is the gap between that adjusted baseline and the metered
// total. Plain before/after comparison is kept only as the biased
// comparator it is.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chillopt/forecaster.hpp"
#include "chillopt/sim.hpp"

namespace chillopt {

enum class BaselineKind { linear_daily, linear_monthly, profile_forecaster };

std::string_view baseline_kind_name(BaselineKind kind);

struct BaselineModel {
  BaselineKind kind = BaselineKind::linear_daily;
  LinearModel linear;         // the two linear kinds
  ProfileForecaster profile;  // the profile kind
  // Instants of the first and last slot the fit saw.
  Timestamp baseline_begin, baseline_end;
};

// Fits on the whole history. Coverage floors: 60 distinct days for the
// daily and profile kinds, 6 distinct calendar months for the monthly
// kind. hp only applies to the profile kind.
BaselineModel fit_baseline(const OperationSeries& history, BaselineKind kind,
                           const MlpHyperparams& hp = {});

struct EnergyBucket {
  Timestamp bucket_start;
  double kwh = 0.0;
};

struct AdjustedBaseline {
  std::vector<EnergyBucket> buckets;
  double total_kwh = 0.0;
};

// What the baseline plant would have drawn under the given weather. Linear
// kinds bucket by calendar day or month and insist every touched bucket is
// completely covered; the profile kind rolls the forecaster forward per
// slot and needs recent operation to seed its lag window.
AdjustedBaseline adjusted_baseline(const BaselineModel& model,
                                   const WeatherSeries& conditions);
AdjustedBaseline adjusted_baseline(const BaselineModel& model,
                                   const WeatherSeries& conditions,
                                   const OperationSeries& recent_history);

struct SavingsDetail {
  Timestamp bucket_start;
  double adjusted_kwh = 0.0;
  double metered_kwh = 0.0;
};

struct SavingsReport {
  BaselineKind method = BaselineKind::linear_daily;
  Timestamp reporting_begin, reporting_end;
  double adjusted_baseline_kwh = 0.0;
  double metered_kwh = 0.0;
  // avoided = adjusted - metered exactly; pct = 100 * avoided / adjusted
  // when the adjusted total is positive, else 0.
  double avoided_kwh = 0.0;
  double savings_pct = 0.0;
  std::vector<SavingsDetail> detail;
};

// The reporting period must start after the baseline period ends.
SavingsReport avoided_energy(const BaselineModel& model,
                             const OperationSeries& reporting);
SavingsReport avoided_energy(const BaselineModel& model,
                             const OperationSeries& reporting,
                             const OperationSeries& recent_history);

// 100 * (baseline - reporting) / baseline. No weather adjustment at all;
// exists to show how far unadjusted comparison drifts.
double naive_savings(double baseline_kwh, double reporting_kwh);

struct CrossvalResult {
  double daily_savings_pct = 0.0;
  double monthly_savings_pct = 0.0;
};

// Runs the avoided-energy pipeline twice, once per linear kind.
CrossvalResult linear_crossval(const OperationSeries& history_pre,
                               const OperationSeries& history_post);

// timestamp,adjusted_baseline_kwh,metered_kwh,avoided_kwh per bucket.
void write_savings_csv(const std::string& path, const SavingsReport& report);

// Full report as JSON, detail included.
void write_savings_json(const std::string& path, const SavingsReport& report);

// Three-curve plot data over both periods:
// timestamp,baseline_kwh,adjusted_baseline_kwh,metered_kwh. Baseline rows
// carry only the first value column, reporting rows the other two.
void write_savings_plot_csv(const std::string& path,
                            const OperationSeries& baseline_history,
                            const SavingsReport& report);

}  // namespace chillopt
