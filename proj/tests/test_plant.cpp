// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "chillopt/plant.hpp"
#include "chillopt/rng.hpp"

using namespace chillopt;

namespace {

WeatherRecord warm_humid() { return make_weather(30.0, 60.0); }

// One chiller (chw 7), one pump and one tower at full speed.
SetpointVector minimal_staffing(const PlantConfig& cfg) {
  auto sp = SetpointVector::all_off(cfg);
  sp.chiller_on[0] = 1;
  sp.chw_supply_setpoint_c[0] = 7.0;
  sp.pump_on[0] = 1;
  sp.pump_speed_frac[0] = 1.0;
  sp.tower_on[0] = 1;
  sp.tower_fan_frac[0] = 1.0;
  return sp;
}

SetpointVector full_blast(const PlantConfig& cfg) {
  auto sp = SetpointVector::all_off(cfg);
  for (std::size_t i = 0; i < cfg.n_chillers(); ++i) {
    sp.chiller_on[i] = 1;
    sp.chw_supply_setpoint_c[i] = 7.0;
  }
  for (std::size_t i = 0; i < cfg.n_pumps(); ++i) {
    sp.pump_on[i] = 1;
    sp.pump_speed_frac[i] = 1.0;
  }
  for (std::size_t i = 0; i < cfg.n_towers(); ++i) {
    sp.tower_on[i] = 1;
    sp.tower_fan_frac[i] = 1.0;
  }
  return sp;
}

// Random valid setpoints with at least one device of each class on.
SetpointVector random_staffed(const PlantConfig& cfg, Rng& rng) {
  auto sp = SetpointVector::all_off(cfg);
  for (std::size_t i = 0; i < cfg.n_chillers(); ++i) {
    sp.chiller_on[i] = rng.bernoulli(0.5);
    if (sp.chiller_on[i]) sp.chw_supply_setpoint_c[i] = rng.uniform(5.0, 11.0);
  }
  for (std::size_t i = 0; i < cfg.n_pumps(); ++i) {
    sp.pump_on[i] = rng.bernoulli(0.5);
    if (sp.pump_on[i]) sp.pump_speed_frac[i] = rng.uniform(0.3, 1.0);
  }
  for (std::size_t i = 0; i < cfg.n_towers(); ++i) {
    sp.tower_on[i] = rng.bernoulli(0.5);
    if (sp.tower_on[i]) sp.tower_fan_frac[i] = rng.uniform(0.2, 1.0);
  }
  if (sp.n_on_chillers() == 0) {
    sp.chiller_on[0] = 1;
    sp.chw_supply_setpoint_c[0] = rng.uniform(5.0, 11.0);
  }
  if (sp.n_on_pumps() == 0) {
    sp.pump_on[0] = 1;
    sp.pump_speed_frac[0] = rng.uniform(0.3, 1.0);
  }
  if (sp.n_on_towers() == 0) {
    sp.tower_on[0] = 1;
    sp.tower_fan_frac[0] = rng.uniform(0.2, 1.0);
  }
  return sp;
}

}  // namespace

TEST_SUITE("plant") {

TEST_CASE("default config satisfies its own invariants") {
  const auto cfg = PlantConfig::default_config();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.n_chillers() == 5);
  CHECK(cfg.n_pumps() == 12);
  CHECK(cfg.n_towers() == 4);
  CHECK(cfg.total_rated_cooling_kw() == doctest::Approx(6000.0));
}

TEST_CASE("config validation catches broken coefficient sums") {
  auto cfg = PlantConfig::default_config();
  cfg.chillers[2].a = 0.3;  // sum now 1.12
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PlantConfig::default_config();
  cfg.pumps[0].rated_power_kw = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PlantConfig::default_config();
  cfg.towers[3].design_approach_c = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PlantConfig::default_config();
  cfg.chillers.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config round-trips through json") {
  const std::string path = "/tmp/chillopt_test_plant.json";
  auto cfg = PlantConfig::default_config();
  cfg.chillers[1].rated_cooling_kw = 1500.0;
  cfg.design_lift_c = 22.0;
  save_plant_config(path, cfg);
  const auto back = load_plant_config(path);
  CHECK(back.design_lift_c == cfg.design_lift_c);
  REQUIRE(back.n_chillers() == cfg.n_chillers());
  CHECK(back.chillers[1].rated_cooling_kw == 1500.0);
  CHECK(back.chillers[0].b == cfg.chillers[0].b);
  CHECK(back.pumps[11].rated_power_kw == cfg.pumps[11].rated_power_kw);
  CHECK(back.towers[3].design_approach_c == cfg.towers[3].design_approach_c);
  std::remove(path.c_str());
  CHECK_THROWS_WITH(load_plant_config("/nonexistent/x.json"),
                    doctest::Contains("cannot open"));
}

TEST_CASE("pump power follows the cube law") {
  CHECK(pump_power(10.0, 1.0) == doctest::Approx(10.0));
  CHECK(pump_power(10.0, 0.5) == doctest::Approx(1.25));
  CHECK(pump_power(8.0, 0.0) == 0.0);
  CHECK_THROWS_AS(pump_power(10.0, 1.2), std::invalid_argument);
  CHECK_THROWS_AS(pump_power(10.0, -0.1), std::invalid_argument);
}

TEST_CASE("chiller power at full load and design lift is rated over COP") {
  const auto cfg = PlantConfig::default_config();
  CHECK(chiller_power(cfg, 0, 1.0, cfg.design_lift_c) ==
        doctest::Approx(1200.0 / 5.5).epsilon(1e-12));
}

TEST_CASE("COP clamps at 1.5x design when lift halves") {
  const auto cfg = PlantConfig::default_config();
  CHECK(chiller_power(cfg, 0, 1.0, cfg.design_lift_c / 2.0) ==
        doctest::Approx(1200.0 / 8.25).epsilon(1e-12));
}

TEST_CASE("part-load quadratic evaluates as documented") {
  PlantConfig cfg = PlantConfig::default_config();
  cfg.chillers[0] = {1000.0, 5.0, 0.2, 1.4, -0.6};
  // f(0.5) = 0.2 + 0.7 - 0.15 = 0.75
  CHECK(chiller_power(cfg, 0, 0.5, cfg.design_lift_c) ==
        doctest::Approx(133.33333333333334).epsilon(1e-12));
}

TEST_CASE("chiller rejects out-of-domain load and lift") {
  const auto cfg = PlantConfig::default_config();
  CHECK_THROWS_WITH_AS(chiller_power(cfg, 0, 1.01, 25.0), "overloaded",
                       std::runtime_error);
  CHECK_THROWS_AS(chiller_power(cfg, 0, 0.0, 25.0), std::invalid_argument);
  CHECK_THROWS_AS(chiller_power(cfg, 0, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(chiller_power(cfg, 0, 0.5, -3.0), std::invalid_argument);
}

TEST_CASE("tower outlet follows the approach line with a floor") {
  const auto cfg = PlantConfig::default_config();
  CHECK(tower_outlet_temp(cfg, 0, 35.0, 20.0, 1.0) == doctest::Approx(22.0));
  CHECK(tower_outlet_temp(cfg, 0, 35.0, 20.0, 0.2) ==
        doctest::Approx(20.0 + 5.0 * (1.0 - 0.12)));
  double prev = 1e9;
  for (double f = 0.2; f <= 1.0; f += 0.05) {
    const double out = tower_outlet_temp(cfg, 0, 35.0, 20.0, f);
    CHECK(out <= prev);
    CHECK(out - 20.0 >= 1.0);
    prev = out;
  }
  PlantConfig tight = cfg;
  tight.towers[0].design_approach_c = 1.2;
  // 1.2 * 0.4 = 0.48 would dip under the floor.
  CHECK(tower_outlet_temp(tight, 0, 35.0, 20.0, 1.0) == doctest::Approx(21.0));
  CHECK_THROWS_WITH_AS(tower_outlet_temp(cfg, 0, 19.0, 20.0, 0.5),
                       "thermodynamics violated", std::runtime_error);
  CHECK_THROWS_AS(tower_outlet_temp(cfg, 0, 35.0, 20.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("setpoints flatten to 42 stable slots and back") {
  const auto cfg = PlantConfig::default_config();
  const auto names = setpoint_slot_names(cfg);
  REQUIRE(names.size() == 42);
  CHECK(names[0] == "chiller1_on");
  CHECK(names[5] == "chiller1_chw_c");
  CHECK(names[10] == "pump1_on");
  CHECK(names[22] == "pump1_speed");
  CHECK(names[34] == "tower1_on");
  CHECK(names[38] == "tower1_fan");
  CHECK(names[41] == "tower4_fan");

  Rng rng(11);
  const auto sp = random_staffed(cfg, rng);
  const auto flat = sp.flatten();
  REQUIRE(flat.size() == 42);
  CHECK(SetpointVector::unflatten(cfg, flat) == sp);
  CHECK_THROWS_AS(
      SetpointVector::unflatten(cfg, std::vector<double>(41, 0.0)),
      std::invalid_argument);
}

TEST_CASE("canonicalization zeroes slots of off devices") {
  const auto cfg = PlantConfig::default_config();
  auto sp = minimal_staffing(cfg);
  sp.pump_speed_frac[5] = 0.7;  // pump 5 stays off
  sp.chw_supply_setpoint_c[2] = 9.0;
  sp.tower_fan_frac[3] = 0.5;
  const auto canon = sp.canonicalized();
  CHECK(canon.pump_speed_frac[5] == 0.0);
  CHECK(canon.chw_supply_setpoint_c[2] == 0.0);
  CHECK(canon.tower_fan_frac[3] == 0.0);
  CHECK(canon.pump_speed_frac[0] == 1.0);
  CHECK(canon.chw_supply_setpoint_c[0] == 7.0);
}

TEST_CASE("strict validation enforces staffing and canonical zeros") {
  const auto cfg = PlantConfig::default_config();
  auto sp = minimal_staffing(cfg);
  CHECK_NOTHROW(validate_setpoints(cfg, sp, 500.0, true));
  sp.pump_speed_frac[5] = 0.7;
  CHECK_NOTHROW(validate_setpoints(cfg, sp, 500.0, false));
  CHECK_THROWS_AS(validate_setpoints(cfg, sp, 500.0, true),
                  std::invalid_argument);
  auto off = SetpointVector::all_off(cfg);
  CHECK_NOTHROW(validate_setpoints(cfg, off, 0.0, true));
  CHECK_THROWS_AS(validate_setpoints(cfg, off, 500.0, true),
                  std::invalid_argument);
  auto bad = minimal_staffing(cfg);
  bad.chw_supply_setpoint_c[0] = 4.0;
  CHECK_THROWS_AS(validate_setpoints(cfg, bad, 0.0, false),
                  std::invalid_argument);
  bad = minimal_staffing(cfg);
  bad.pump_speed_frac[0] = 0.2;
  CHECK_THROWS_AS(validate_setpoints(cfg, bad, 0.0, false),
                  std::invalid_argument);
}

TEST_CASE("plant_step null case") {
  const auto cfg = PlantConfig::default_config();
  const auto out =
      plant_step(cfg, warm_humid(), SetpointVector::all_off(cfg), 0.0);
  CHECK(out.power_kw == 0.0);
  CHECK(out.cooling_kw == 0.0);
}

TEST_CASE("plant_step saturates at on-chiller capacity") {
  const auto cfg = PlantConfig::default_config();
  const auto out = plant_step(cfg, warm_humid(), full_blast(cfg), 9000.0);
  CHECK(out.cooling_kw == doctest::Approx(6000.0));
}

TEST_CASE("plant_step matches the hand-summed component example") {
  // One chiller at plr 0.5 (600 of 1200 kW), one pump and one fan at 1.0.
  // Expected value evaluated by hand from the three component formulas.
  const auto cfg = PlantConfig::default_config();
  const auto out = plant_step(cfg, warm_humid(), minimal_staffing(cfg), 600.0);
  CHECK(out.cooling_kw == doctest::Approx(600.0));
  CHECK(out.power_kw == doctest::Approx(189.72600105584564).epsilon(1e-12));
}

TEST_CASE("plant_step equals the sum of its component formulas") {
  const auto cfg = PlantConfig::default_config();
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto w = make_weather(rng.uniform(8.0, 38.0),
                                rng.uniform(30.0, 100.0));
    const auto sp = random_staffed(cfg, rng);
    const double demand = rng.uniform(0.0, 7000.0);
    const auto out = plant_step(cfg, w, sp, demand);

    double flow = 0.0, parasitic = 0.0;
    for (std::size_t i = 0; i < cfg.n_pumps(); ++i)
      if (sp.pump_on[i]) {
        parasitic += pump_power(cfg.pumps[i].rated_power_kw,
                                sp.pump_speed_frac[i]);
        flow += sp.pump_speed_frac[i];
      }
    for (std::size_t i = 0; i < cfg.n_towers(); ++i)
      if (sp.tower_on[i])
        parasitic += pump_power(cfg.towers[i].rated_fan_kw,
                                sp.tower_fan_frac[i]);
    double cap = 0.0;
    for (std::size_t i = 0; i < cfg.n_chillers(); ++i)
      if (sp.chiller_on[i]) cap += cfg.chillers[i].rated_cooling_kw;
    const double delivered =
        std::min({demand, cap, flow * cfg.total_rated_cooling_kw() /
                                   static_cast<double>(cfg.n_chillers())});
    CHECK(out.cooling_kw == doctest::Approx(delivered).epsilon(1e-12));

    double expect = parasitic;
    if (delivered > 0.0) {
      double outlet = 0.0;
      for (std::size_t i = 0; i < cfg.n_towers(); ++i)
        if (sp.tower_on[i])
          outlet += tower_outlet_temp(cfg, i, w.wet_bulb_c + 10.0,
                                      w.wet_bulb_c, sp.tower_fan_frac[i]);
      const double cond = outlet / static_cast<double>(sp.n_on_towers());
      for (std::size_t i = 0; i < cfg.n_chillers(); ++i)
        if (sp.chiller_on[i])
          expect += chiller_power(
              cfg, i, delivered / cap,
              std::max(cond - sp.chw_supply_setpoint_c[i], 1.0));
    }
    CHECK(out.power_kw ==
          doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("unstaffed plant pays parasitics and delivers nothing") {
  const auto cfg = PlantConfig::default_config();
  auto sp = SetpointVector::all_off(cfg);
  sp.pump_on[0] = sp.pump_on[1] = 1;
  sp.pump_speed_frac[0] = sp.pump_speed_frac[1] = 0.9;
  sp.tower_on[0] = 1;
  sp.tower_fan_frac[0] = 0.9;
  const auto out = plant_step(cfg, warm_humid(), sp, 1500.0);
  CHECK(out.cooling_kw == 0.0);
  CHECK(out.power_kw ==
        doctest::Approx(2 * pump_power(45.0, 0.9) + pump_power(30.0, 0.9)));

  // Same for a missing tower.
  auto no_tower = minimal_staffing(cfg);
  no_tower.tower_on[0] = 0;
  const auto out2 = plant_step(cfg, warm_humid(), no_tower, 1500.0);
  CHECK(out2.cooling_kw == 0.0);
}

TEST_CASE("pump flow caps delivered cooling") {
  const auto cfg = PlantConfig::default_config();
  auto sp = minimal_staffing(cfg);
  sp.pump_speed_frac[0] = 0.5;  // carries half a chiller's flow
  const auto out = plant_step(cfg, warm_humid(), sp, 1000.0);
  CHECK(out.cooling_kw == doctest::Approx(600.0));
}

TEST_CASE("raising any pump speed never lowers total power") {
  const auto cfg = PlantConfig::default_config();
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = make_weather(rng.uniform(10.0, 36.0),
                                rng.uniform(30.0, 95.0));
    auto sp = random_staffed(cfg, rng);
    const double demand = rng.uniform(0.0, 5000.0);
    const double base = plant_step(cfg, w, sp, demand).power_kw;
    for (std::size_t i = 0; i < cfg.n_pumps(); ++i) {
      if (!sp.pump_on[i] || sp.pump_speed_frac[i] > 0.95) continue;
      auto bumped = sp;
      bumped.pump_speed_frac[i] += 0.05;
      CHECK(plant_step(cfg, w, bumped, demand).power_kw >= base - 1e-9);
    }
  }
}

TEST_CASE("faster fans trade fan power against chiller power") {
  // The tower coupling is the efficiency headroom the optimizer exploits:
  // fan power rises with the cube law while chiller power falls with lift.
  const auto cfg = PlantConfig::default_config();
  auto sp = minimal_staffing(cfg);
  const auto w = warm_humid();
  double prev_total_fan = -1.0, prev_chiller = 1e18;
  for (double f = 0.2; f <= 1.0001; f += 0.1) {
    sp.tower_fan_frac[0] = std::min(f, 1.0);
    const auto out = plant_step(cfg, w, sp, 900.0);
    const double fan = pump_power(30.0, sp.tower_fan_frac[0]);
    const double chiller = out.power_kw - fan - pump_power(45.0, 1.0);
    CHECK(fan >= prev_total_fan);
    CHECK(chiller <= prev_chiller + 1e-9);
    prev_total_fan = fan;
    prev_chiller = chiller;
  }
}

TEST_CASE("plant COP stays within physical bounds") {
  const auto cfg = PlantConfig::default_config();
  Rng rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const auto w = make_weather(rng.uniform(8.0, 38.0),
                                rng.uniform(30.0, 100.0));
    const auto sp = random_staffed(cfg, rng);
    const auto out = plant_step(cfg, w, sp, rng.uniform(0.0, 6500.0));
    CHECK(out.cooling_kw >= 0.0);
    CHECK(out.power_kw >= 0.0);
    if (out.cooling_kw > 0.0) {
      const double cop = out.cooling_kw / out.power_kw;
      CHECK(cop > 0.0);
      CHECK(cop <= 12.0);
    }
  }
}

TEST_CASE("legacy policy stages by the 85 percent rule") {
  const auto cfg = PlantConfig::default_config();
  const auto off = legacy_policy(cfg, 0.0);
  CHECK(off.n_on_chillers() == 0);
  CHECK(off.n_on_pumps() == 0);
  CHECK(off.n_on_towers() == 0);

  // 0.85 * 1200 = 1020: at the threshold one chiller still suffices.
  CHECK(legacy_policy(cfg, 1020.0).n_on_chillers() == 1);
  CHECK(legacy_policy(cfg, 1020.1).n_on_chillers() == 2);

  const auto sp = legacy_policy(cfg, 2000.0);
  CHECK(sp.n_on_chillers() == 2);
  CHECK(sp.n_on_pumps() == 5);   // ceil(12 * 2 / 5)
  CHECK(sp.n_on_towers() == 2);  // ceil(4 * 2 / 5)
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(sp.chw_supply_setpoint_c[i] == 7.0);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(sp.pump_speed_frac[i] == 0.9);
  CHECK(sp.tower_fan_frac[0] == 0.9);

  // Equal demands give equal setpoints; the rule sees only the demand.
  CHECK(legacy_policy(cfg, 2000.0) == sp);
}

TEST_CASE("legacy operation always meets feasible demand") {
  const auto cfg = PlantConfig::default_config();
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto w = make_weather(rng.uniform(8.0, 38.0),
                                rng.uniform(30.0, 100.0));
    const double demand = rng.uniform(0.0, 5000.0);
    const auto out = plant_step(cfg, w, legacy_policy(cfg, demand), demand);
    CHECK(out.cooling_kw == doctest::Approx(demand).epsilon(1e-12));
  }
}

}  // TEST_SUITE
