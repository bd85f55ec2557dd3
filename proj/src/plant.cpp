// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/plant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace chillopt {

namespace {

using nlohmann::json;

// Lift the plant can never fall below; keeps chiller_power in domain even
// when a high chilled-water setpoint meets a cold condenser loop.
constexpr double kMinLiftC = 1.0;

// Tower approach can never go below this regardless of fan speed.
constexpr double kApproachFloorC = 1.0;

// COP clamp relative to design COP.
constexpr double kCopClampFactor = 1.5;

// Nominal condenser-loop temperature rise used only to form a valid tower
// inlet estimate; the outlet model does not depend on it.
constexpr double kCondenserRiseC = 10.0;

[[noreturn]] void config_error(const std::string& what) {
  throw std::invalid_argument("plant config: " + what);
}

}  // namespace

double PlantConfig::total_rated_cooling_kw() const {
  double total = 0.0;
  for (const auto& ch : chillers) total += ch.rated_cooling_kw;
  return total;
}

PlantConfig PlantConfig::default_config() {
  PlantConfig cfg;
  cfg.design_lift_c = 25.0;
  cfg.chillers.assign(5, ChillerSpec{1200.0, 5.5, 0.18, 1.35, -0.53});
  cfg.pumps.assign(12, PumpSpec{45.0});
  cfg.towers.assign(4, TowerSpec{30.0, 5.0});
  return cfg;
}

void PlantConfig::validate() const {
  if (chillers.empty()) config_error("need at least one chiller");
  if (pumps.empty()) config_error("need at least one pump");
  if (towers.empty()) config_error("need at least one tower");
  if (!(design_lift_c > 0.0)) config_error("design_lift_c must be positive");
  for (const auto& ch : chillers) {
    if (!(ch.rated_cooling_kw > 0.0))
      config_error("rated_cooling_kw must be positive");
    if (!(ch.design_cop > 0.0)) config_error("design_cop must be positive");
    if (std::abs(ch.a + ch.b + ch.c - 1.0) > 1e-12)
      config_error("part_load_coeffs must sum to 1");
  }
  for (const auto& p : pumps)
    if (!(p.rated_power_kw > 0.0))
      config_error("rated_power_kw must be positive");
  for (const auto& t : towers) {
    if (!(t.rated_fan_kw > 0.0)) config_error("rated_fan_kw must be positive");
    if (!(t.design_approach_c > 0.0))
      config_error("design_approach_c must be positive");
  }
}

PlantConfig load_plant_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("bad json in " + path + ": " + e.what());
  }
  PlantConfig cfg;
  try {
    cfg.design_lift_c = j.at("design_lift_c").get<double>();
    for (const auto& jc : j.at("chillers")) {
      const auto coeffs = jc.at("part_load_coeffs");
      if (!coeffs.is_array() || coeffs.size() != 3)
        throw std::runtime_error("part_load_coeffs must have 3 entries");
      cfg.chillers.push_back({jc.at("rated_cooling_kw").get<double>(),
                              jc.at("design_cop").get<double>(),
                              coeffs[0].get<double>(),
                              coeffs[1].get<double>(),
                              coeffs[2].get<double>()});
    }
    for (const auto& jp : j.at("pumps"))
      cfg.pumps.push_back({jp.at("rated_power_kw").get<double>()});
    for (const auto& jt : j.at("towers"))
      cfg.towers.push_back({jt.at("rated_fan_kw").get<double>(),
                            jt.at("design_approach_c").get<double>()});
  } catch (const json::exception& e) {
    throw std::runtime_error("bad plant config " + path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

void save_plant_config(const std::string& path, const PlantConfig& cfg) {
  cfg.validate();
  json j;
  j["design_lift_c"] = cfg.design_lift_c;
  j["chillers"] = json::array();
  for (const auto& ch : cfg.chillers)
    j["chillers"].push_back({{"rated_cooling_kw", ch.rated_cooling_kw},
                             {"design_cop", ch.design_cop},
                             {"part_load_coeffs", {ch.a, ch.b, ch.c}}});
  j["pumps"] = json::array();
  for (const auto& p : cfg.pumps)
    j["pumps"].push_back({{"rated_power_kw", p.rated_power_kw}});
  j["towers"] = json::array();
  for (const auto& t : cfg.towers)
    j["towers"].push_back({{"rated_fan_kw", t.rated_fan_kw},
                           {"design_approach_c", t.design_approach_c}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

SetpointVector SetpointVector::all_off(const PlantConfig& cfg) {
  SetpointVector sp;
  sp.chiller_on.assign(cfg.n_chillers(), 0);
  sp.chw_supply_setpoint_c.assign(cfg.n_chillers(), 0.0);
  sp.pump_on.assign(cfg.n_pumps(), 0);
  sp.pump_speed_frac.assign(cfg.n_pumps(), 0.0);
  sp.tower_on.assign(cfg.n_towers(), 0);
  sp.tower_fan_frac.assign(cfg.n_towers(), 0.0);
  return sp;
}

std::size_t SetpointVector::n_on_chillers() const {
  return static_cast<std::size_t>(
      std::count(chiller_on.begin(), chiller_on.end(), 1));
}

std::size_t SetpointVector::n_on_pumps() const {
  return static_cast<std::size_t>(
      std::count(pump_on.begin(), pump_on.end(), 1));
}

std::size_t SetpointVector::n_on_towers() const {
  return static_cast<std::size_t>(
      std::count(tower_on.begin(), tower_on.end(), 1));
}

SetpointVector SetpointVector::canonicalized() const {
  SetpointVector sp = *this;
  for (std::size_t i = 0; i < sp.chiller_on.size(); ++i)
    if (!sp.chiller_on[i]) sp.chw_supply_setpoint_c[i] = 0.0;
  for (std::size_t i = 0; i < sp.pump_on.size(); ++i)
    if (!sp.pump_on[i]) sp.pump_speed_frac[i] = 0.0;
  for (std::size_t i = 0; i < sp.tower_on.size(); ++i)
    if (!sp.tower_on[i]) sp.tower_fan_frac[i] = 0.0;
  return sp;
}

std::vector<double> SetpointVector::flatten() const {
  std::vector<double> out;
  out.reserve(2 * chiller_on.size() + 2 * pump_on.size() +
              2 * tower_on.size());
  for (auto b : chiller_on) out.push_back(b ? 1.0 : 0.0);
  for (double v : chw_supply_setpoint_c) out.push_back(v);
  for (auto b : pump_on) out.push_back(b ? 1.0 : 0.0);
  for (double v : pump_speed_frac) out.push_back(v);
  for (auto b : tower_on) out.push_back(b ? 1.0 : 0.0);
  for (double v : tower_fan_frac) out.push_back(v);
  return out;
}

SetpointVector SetpointVector::unflatten(const PlantConfig& cfg,
                                         std::span<const double> slots) {
  const std::size_t want =
      2 * cfg.n_chillers() + 2 * cfg.n_pumps() + 2 * cfg.n_towers();
  if (slots.size() != want)
    throw std::invalid_argument("setpoint slot count mismatch");
  SetpointVector sp = all_off(cfg);
  std::size_t k = 0;
  for (std::size_t i = 0; i < cfg.n_chillers(); ++i)
    sp.chiller_on[i] = slots[k++] != 0.0;
  for (std::size_t i = 0; i < cfg.n_chillers(); ++i)
    sp.chw_supply_setpoint_c[i] = slots[k++];
  for (std::size_t i = 0; i < cfg.n_pumps(); ++i)
    sp.pump_on[i] = slots[k++] != 0.0;
  for (std::size_t i = 0; i < cfg.n_pumps(); ++i)
    sp.pump_speed_frac[i] = slots[k++];
  for (std::size_t i = 0; i < cfg.n_towers(); ++i)
    sp.tower_on[i] = slots[k++] != 0.0;
  for (std::size_t i = 0; i < cfg.n_towers(); ++i)
    sp.tower_fan_frac[i] = slots[k++];
  return sp;
}

std::vector<std::string> setpoint_slot_names(const PlantConfig& cfg) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= cfg.n_chillers(); ++i)
    names.push_back("chiller" + std::to_string(i) + "_on");
  for (std::size_t i = 1; i <= cfg.n_chillers(); ++i)
    names.push_back("chiller" + std::to_string(i) + "_chw_c");
  for (std::size_t i = 1; i <= cfg.n_pumps(); ++i)
    names.push_back("pump" + std::to_string(i) + "_on");
  for (std::size_t i = 1; i <= cfg.n_pumps(); ++i)
    names.push_back("pump" + std::to_string(i) + "_speed");
  for (std::size_t i = 1; i <= cfg.n_towers(); ++i)
    names.push_back("tower" + std::to_string(i) + "_on");
  for (std::size_t i = 1; i <= cfg.n_towers(); ++i)
    names.push_back("tower" + std::to_string(i) + "_fan");
  return names;
}

void validate_setpoints(const PlantConfig& cfg, const SetpointVector& sp,
                        double cooling_demand_kw, bool strict) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("setpoints: " + what);
  };
  if (sp.chiller_on.size() != cfg.n_chillers() ||
      sp.chw_supply_setpoint_c.size() != cfg.n_chillers() ||
      sp.pump_on.size() != cfg.n_pumps() ||
      sp.pump_speed_frac.size() != cfg.n_pumps() ||
      sp.tower_on.size() != cfg.n_towers() ||
      sp.tower_fan_frac.size() != cfg.n_towers())
    fail("device count mismatch");
  for (std::size_t i = 0; i < cfg.n_chillers(); ++i) {
    const double chw = sp.chw_supply_setpoint_c[i];
    if (sp.chiller_on[i]) {
      if (!(chw >= 5.0 && chw <= 11.0))
        fail("chw setpoint out of [5, 11]");
    } else if (strict && chw != 0.0) {
      fail("off chiller must have zero chw slot");
    }
  }
  for (std::size_t i = 0; i < cfg.n_pumps(); ++i) {
    const double s = sp.pump_speed_frac[i];
    if (sp.pump_on[i]) {
      if (!(s >= 0.3 && s <= 1.0)) fail("pump speed out of [0.3, 1]");
    } else if (strict && s != 0.0) {
      fail("off pump must have zero speed");
    }
  }
  for (std::size_t i = 0; i < cfg.n_towers(); ++i) {
    const double f = sp.tower_fan_frac[i];
    if (sp.tower_on[i]) {
      if (!(f >= 0.2 && f <= 1.0)) fail("tower fan out of [0.2, 1]");
    } else if (strict && f != 0.0) {
      fail("off tower must have zero fan slot");
    }
  }
  if (strict && cooling_demand_kw > 0.0 &&
      (sp.n_on_chillers() == 0 || sp.n_on_pumps() == 0 ||
       sp.n_on_towers() == 0))
    fail("demand positive but a device class is fully off");
}

double pump_power(double rated_power_kw, double speed_frac) {
  if (!(speed_frac >= 0.0 && speed_frac <= 1.0))
    throw std::invalid_argument("speed_frac out of [0, 1]");
  return rated_power_kw * speed_frac * speed_frac * speed_frac;
}

double chiller_power(const PlantConfig& cfg, std::size_t idx, double plr,
                     double lift_c) {
  const auto& ch = cfg.chillers.at(idx);
  if (plr > 1.0) throw std::runtime_error("overloaded");
  if (!(plr > 0.0)) throw std::invalid_argument("plr out of (0, 1]");
  if (!(lift_c > 0.0)) throw std::invalid_argument("lift must be positive");
  const double part_load = ch.a + ch.b * plr + ch.c * plr * plr;
  const double cop = std::min(
      ch.design_cop * part_load * (cfg.design_lift_c / lift_c),
      kCopClampFactor * ch.design_cop);
  return plr * ch.rated_cooling_kw / cop;
}

double tower_outlet_temp(const PlantConfig& cfg, std::size_t idx,
                         double condenser_inlet_c, double wet_bulb_c,
                         double fan_frac) {
  const auto& t = cfg.towers.at(idx);
  if (condenser_inlet_c <= wet_bulb_c)
    throw std::runtime_error("thermodynamics violated");
  if (!(fan_frac >= 0.2 && fan_frac <= 1.0))
    throw std::invalid_argument("fan_frac out of [0.2, 1]");
  const double approach =
      std::max(t.design_approach_c * (1.0 - 0.6 * fan_frac), kApproachFloorC);
  return wet_bulb_c + approach;
}

PlantOutput plant_step(const PlantConfig& cfg, const WeatherRecord& weather,
                       const SetpointVector& sp, double cooling_demand_kw) {
  if (!(cooling_demand_kw >= 0.0))
    throw std::invalid_argument("demand must be nonnegative");
  validate_setpoints(cfg, sp, cooling_demand_kw, /*strict=*/false);

  double parasitic_kw = 0.0;
  double flow_sum = 0.0;
  for (std::size_t i = 0; i < cfg.n_pumps(); ++i) {
    if (!sp.pump_on[i]) continue;
    parasitic_kw += pump_power(cfg.pumps[i].rated_power_kw,
                               sp.pump_speed_frac[i]);
    flow_sum += sp.pump_speed_frac[i];
  }
  for (std::size_t i = 0; i < cfg.n_towers(); ++i)
    if (sp.tower_on[i])
      parasitic_kw += pump_power(cfg.towers[i].rated_fan_kw,
                                 sp.tower_fan_frac[i]);

  double on_capacity_kw = 0.0;
  for (std::size_t i = 0; i < cfg.n_chillers(); ++i)
    if (sp.chiller_on[i]) on_capacity_kw += cfg.chillers[i].rated_cooling_kw;

  const bool staffed = on_capacity_kw > 0.0 && sp.n_on_pumps() > 0 &&
                       sp.n_on_towers() > 0;
  if (cooling_demand_kw == 0.0 || !staffed)
    return {parasitic_kw, 0.0};

  // Pump flow limits delivery. One pump at full speed carries one average
  // chiller's design flow; the bank of 12 over 5 chillers is deliberate
  // redundancy headroom.
  const double per_pump_kw =
      cfg.total_rated_cooling_kw() / static_cast<double>(cfg.n_chillers());
  const double delivered_kw = std::min(
      {cooling_demand_kw, on_capacity_kw, flow_sum * per_pump_kw});
  if (delivered_kw <= 0.0) return {parasitic_kw, 0.0};

  // Parallel towers at their own fan speeds; condenser supply is their mean
  // outlet. The inlet estimate only needs to sit above wet bulb.
  const double inlet_est = weather.wet_bulb_c + kCondenserRiseC;
  double outlet_sum = 0.0;
  for (std::size_t i = 0; i < cfg.n_towers(); ++i)
    if (sp.tower_on[i])
      outlet_sum += tower_outlet_temp(cfg, i, inlet_est, weather.wet_bulb_c,
                                      sp.tower_fan_frac[i]);
  const double condenser_supply_c =
      outlet_sum / static_cast<double>(sp.n_on_towers());

  // Load splits proportionally to rated capacity, so every on chiller runs
  // at the same part-load ratio.
  const double plr = delivered_kw / on_capacity_kw;
  double chiller_kw = 0.0;
  for (std::size_t i = 0; i < cfg.n_chillers(); ++i) {
    if (!sp.chiller_on[i]) continue;
    const double lift =
        std::max(condenser_supply_c - sp.chw_supply_setpoint_c[i], kMinLiftC);
    chiller_kw += chiller_power(cfg, i, plr, lift);
  }
  return {parasitic_kw + chiller_kw, delivered_kw};
}

SetpointVector legacy_policy(const PlantConfig& cfg,
                             double cooling_demand_kw) {
  if (!(cooling_demand_kw >= 0.0))
    throw std::invalid_argument("demand must be nonnegative");
  SetpointVector sp = SetpointVector::all_off(cfg);
  if (cooling_demand_kw == 0.0) return sp;

  // Stage chillers in index order until 85 percent of the on-capacity
  // covers demand; cap at the full plant.
  std::size_t k = 0;
  double staged_kw = 0.0;
  while (k < cfg.n_chillers() &&
         0.85 * staged_kw < cooling_demand_kw) {
    staged_kw += cfg.chillers[k].rated_cooling_kw;
    ++k;
  }

  for (std::size_t i = 0; i < k; ++i) {
    sp.chiller_on[i] = 1;
    sp.chw_supply_setpoint_c[i] = 7.0;
  }
  const auto n_pumps = static_cast<std::size_t>(
      (cfg.n_pumps() * k + cfg.n_chillers() - 1) / cfg.n_chillers());
  for (std::size_t i = 0; i < n_pumps; ++i) {
    sp.pump_on[i] = 1;
    sp.pump_speed_frac[i] = 0.9;
  }
  const auto n_towers = static_cast<std::size_t>(
      (cfg.n_towers() * k + cfg.n_chillers() - 1) / cfg.n_chillers());
  for (std::size_t i = 0; i < n_towers; ++i) {
    sp.tower_on[i] = 1;
    sp.tower_fan_frac[i] = 0.9;
  }
  return sp;
}

}  // namespace chillopt
