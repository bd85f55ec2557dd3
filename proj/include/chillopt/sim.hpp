// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "chillopt/plant.hpp"

namespace chillopt {

// Subtropical climate with cooling load year round: mild winters, hot humid
// summers, afternoon temperature peak with humidity moving the other way.
struct WeatherProfile {
  double annual_mean_c = 23.0;
  double seasonal_amp_c = 8.0;
  double diurnal_amp_c = 4.0;
  double noise_sd_c = 1.2;
  double rh_mean_pct = 70.0;
  double rh_diurnal_swing_pct = 12.0;
  double rh_noise_sd_pct = 5.0;
  Timestamp start = Timestamp::civil(2021, 1, 4);
};

// Deterministic per seed; dry bulb clamped to [5, 38], humidity to
// [30, 100]. 96 slots per day.
WeatherSeries synth_weather(std::uint64_t seed, int n_days,
                            const WeatherProfile& profile = {});

// Cooling demand as an affine function of weather plus an occupancy
// schedule and Gaussian noise. The occupancy term is what weather alone
// cannot explain.
struct DemandModel {
  double base_kw = 900.0;
  double temp_coeff_kw_per_c = 95.0;
  double ref_temp_c = 12.0;
  double humidity_coeff_kw_per_pct = 3.0;
  double humidity_ref_pct = 50.0;
  double occupancy_weekday_kw = 260.0;
  double occupancy_weekend_kw = 100.0;
  double noise_sd_kw = 60.0;

  // Noise-free component; hours 9 to 17 run at full occupancy with cosine
  // shoulders 7 to 9 and 17 to 19.
  double mean_demand_kw(const Timestamp& t, const WeatherRecord& w) const;
};

struct OperationRecord {
  WeatherRecord weather;
  SetpointVector setpoints;
  PlantOutput output;
  double demand_kw = 0.0;
};

using OperationSeries = TimeSeries<OperationRecord>;

// Legacy-operated history: synthetic weather, demand from the model,
// setpoints from legacy_policy, outputs from plant_step. Gap free.
OperationSeries generate_history(const PlantConfig& cfg, std::uint64_t seed,
                                 int n_days, const DemandModel& demand = {},
                                 const WeatherProfile& profile = {});

// Writes weather.csv, energy.csv, and setpoints.csv under dir (created if
// missing). Setpoint columns follow setpoint_slot_names. Demand is not
// exported: delivered cooling is the metered quantity.
void write_history_csvs(const std::string& dir, const PlantConfig& cfg,
                        const OperationSeries& history);

// Scalar interval series with an arbitrary value column name.
void write_scalar_csv(const std::string& path, const std::string& value_name,
                      const ScalarSeries& series);
ScalarSeries read_scalar_csv(const std::string& path,
                             const std::string& value_name);

// Setpoint schedule export/import, canonical slot order.
void write_setpoints_csv(const std::string& path, const PlantConfig& cfg,
                         const TimeSeries<SetpointVector>& series);
TimeSeries<SetpointVector> read_setpoints_csv(const std::string& path,
                                              const PlantConfig& cfg);

}  // namespace chillopt
