// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chillopt/records.hpp"

namespace chillopt {

// Ground-truth plant. Device curves are deliberately simple quasi-static
// models; every coefficient lives here so tests can plant known optima.

struct ChillerSpec {
  double rated_cooling_kw = 0.0;
  double design_cop = 0.0;
  // Part-load efficiency factor f(p) = a + b p + c p^2 with f(1) = 1.
  double a = 0.0, b = 0.0, c = 0.0;
};

struct PumpSpec {
  double rated_power_kw = 0.0;
};

struct TowerSpec {
  double rated_fan_kw = 0.0;
  double design_approach_c = 0.0;
};

struct PlantConfig {
  std::vector<ChillerSpec> chillers;
  std::vector<PumpSpec> pumps;
  std::vector<TowerSpec> towers;
  // Temperature difference the chillers are rated at; COP scales with
  // design_lift_c / actual lift.
  double design_lift_c = 0.0;

  std::size_t n_chillers() const { return chillers.size(); }
  std::size_t n_pumps() const { return pumps.size(); }
  std::size_t n_towers() const { return towers.size(); }

  double total_rated_cooling_kw() const;

  // 5 chillers, 12 pumps, 4 cooling towers.
  static PlantConfig default_config();

  // Throws std::invalid_argument when any invariant fails: counts >= 1,
  // rated values > 0, approach > 0, lift > 0, a + b + c = 1 per chiller.
  void validate() const;
};

PlantConfig load_plant_config(const std::string& path);
void save_plant_config(const std::string& path, const PlantConfig& cfg);

// Control vector. Off devices carry no physical meaning in their continuous
// slots; canonicalized() zeroes them so equal plant states compare equal.
struct SetpointVector {
  std::vector<std::uint8_t> chiller_on;        // 0/1 per chiller
  std::vector<double> chw_supply_setpoint_c;   // per chiller, [5, 11] when on
  std::vector<std::uint8_t> pump_on;           // 0/1 per pump
  std::vector<double> pump_speed_frac;         // per pump, [0.3, 1] when on
  std::vector<std::uint8_t> tower_on;          // 0/1 per tower
  std::vector<double> tower_fan_frac;          // per tower, [0.2, 1] when on

  static SetpointVector all_off(const PlantConfig& cfg);

  std::size_t n_on_chillers() const;
  std::size_t n_on_pumps() const;
  std::size_t n_on_towers() const;

  SetpointVector canonicalized() const;

  // Flattened layout (default config, 42 slots): chiller_on x5,
  // chw_supply_setpoint_c x5, pump_on x12, pump_speed_frac x12,
  // tower_on x4, tower_fan_frac x4. On-flags encode as 0.0 / 1.0.
  std::vector<double> flatten() const;
  static SetpointVector unflatten(const PlantConfig& cfg,
                                  std::span<const double> slots);

  bool operator==(const SetpointVector&) const = default;
};

// Stable column names for the flattened layout, e.g. "chiller1_on",
// "chiller1_chw_c", "pump1_on", "pump1_speed", "tower1_on", "tower1_fan".
std::vector<std::string> setpoint_slot_names(const PlantConfig& cfg);

// Range checks for on devices plus, in strict mode, zeroed off slots and
// the staffing rule (at least one chiller, pump, and tower on when demand
// is positive). plant_step itself runs the lenient form; loaders and the
// CLI run strict.
void validate_setpoints(const PlantConfig& cfg, const SetpointVector& sp,
                        double cooling_demand_kw, bool strict);

struct PlantOutput {
  double power_kw = 0.0;
  double cooling_kw = 0.0;

  bool operator==(const PlantOutput&) const = default;
};

// Affinity cube law; also used for tower fans on rated_fan_kw.
double pump_power(double rated_power_kw, double speed_frac);

// Electrical power of chiller idx serving plr of its rated capacity across
// lift_c degrees. COP is design_cop scaled by the part-load factor and by
// design_lift_c / lift_c, clamped to 1.5x design_cop.
double chiller_power(const PlantConfig& cfg, std::size_t idx, double plr,
                     double lift_c);

// Condenser water supply temperature from tower idx. The approach shrinks
// linearly with fan speed down to a 1 degree floor.
double tower_outlet_temp(const PlantConfig& cfg, std::size_t idx,
                         double condenser_inlet_c, double wet_bulb_c,
                         double fan_frac);

// One quasi-static interval. Delivered cooling is bounded by on-chiller
// capacity and by pump flow (sum of on-pump speeds over the full pump
// bank); an unstaffed plant (no chiller, pump, or tower on) delivers
// nothing and still pays the parasitic pump and fan power.
PlantOutput plant_step(const PlantConfig& cfg, const WeatherRecord& weather,
                       const SetpointVector& sp, double cooling_demand_kw);

// Fixed-rule baseline operation: chillers staged so the on-capacity covers
// demand at 85 percent loading, pumps and towers staffed proportionally and
// run at 0.9, chilled water fixed at 7 degrees. Depends only on demand.
SetpointVector legacy_policy(const PlantConfig& cfg, double cooling_demand_kw);

}  // namespace chillopt
