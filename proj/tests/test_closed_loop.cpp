// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "chillopt/closed_loop.hpp"

using namespace chillopt;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/" + name) {
    std::remove(path.c_str());
  }
  ~TempFile() { std::remove(path.c_str()); }
};

// Smallest config that still exercises every phase: one legacy day, one
// augmentation day, two post-retrain days.
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.history_days = 70;
  cfg.holdout_days = 7;
  cfg.deployment_days = 4;
  cfg.augmentation_days = 1;
  cfg.ecm_start_day = 1;
  cfg.stability_seeds = 10;
  cfg.surrogate_hp.hidden = 16;
  cfg.surrogate_hp.max_epochs = 120;
  cfg.forecaster_hp.hidden = 16;
  cfg.forecaster_hp.max_epochs = 120;
  cfg.ga.population = 32;
  cfg.ga.generations = 40;
  return cfg;
}

const ClosedLoopReport& small_report() {
  static ClosedLoopReport report = run_experiment(small_config());
  return report;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("closed_loop") {

TEST_CASE("config validation names the broken field") {
  const auto base = small_config();

  auto cfg = base;
  cfg.holdout_days = 6;
  CHECK_THROWS_WITH_AS(run_experiment(cfg),
                       "holdout must cover at least 7 days",
                       std::invalid_argument);

  cfg = base;
  cfg.history_days = 66;
  CHECK_THROWS_WITH_AS(run_experiment(cfg),
                       "history must leave at least 60 training days",
                       std::invalid_argument);

  cfg = base;
  cfg.deployment_days = 0;
  CHECK_THROWS_WITH_AS(run_experiment(cfg),
                       "deployment must cover at least one day",
                       std::invalid_argument);

  cfg = base;
  cfg.augmentation_days = 0;
  CHECK_THROWS_WITH_AS(run_experiment(cfg),
                       "augmentation window must cover at least one day",
                       std::invalid_argument);

  cfg = base;
  cfg.ecm_start_day = -1;
  CHECK_THROWS_WITH_AS(run_experiment(cfg),
                       "changeover day cannot be negative",
                       std::invalid_argument);

  cfg = base;
  cfg.augmentation_days = 3;
  CHECK_THROWS_WITH_AS(run_experiment(cfg),
                       "augmentation window must end before deployment does",
                       std::invalid_argument);

  cfg = base;
  cfg.step_limit_fraction = 1.5;
  CHECK_THROWS_WITH_AS(run_experiment(cfg),
                       "step limit fraction must lie in [0, 1]",
                       std::invalid_argument);
}

TEST_CASE("drift metric arithmetic") {
  SurrogateMetrics pre, post;
  pre.power_mape.mape_pct = 4.0;
  post.power_mape.mape_pct = 4.0;
  CHECK(drift_metric(pre, post) == 1.0);
  post.power_mape.mape_pct = 8.0;
  CHECK(drift_metric(pre, post) == 2.0);
  pre.power_mape.mape_pct = 0.0;
  CHECK_THROWS_WITH_AS(drift_metric(pre, post), "degenerate reference",
                       std::invalid_argument);
}

TEST_CASE("phase names") {
  CHECK(phase_name(Phase::legacy) == "legacy");
  CHECK(phase_name(Phase::pre_retrain) == "pre_retrain");
  CHECK(phase_name(Phase::post_retrain) == "post_retrain");
}

TEST_CASE("phases cover the deployment in order") {
  const auto& r = small_report();
  const auto cfg = small_config();
  const std::size_t per_day = 96;

  REQUIRE(r.intervals.size() ==
          static_cast<std::size_t>(cfg.deployment_days) * per_day);
  for (std::size_t i = 0; i < r.intervals.size(); ++i) {
    const auto& row = r.intervals[i];
    const std::size_t day = i / per_day;
    Phase want = Phase::post_retrain;
    if (day < static_cast<std::size_t>(cfg.ecm_start_day))
      want = Phase::legacy;
    else if (day < static_cast<std::size_t>(cfg.ecm_start_day +
                                            cfg.augmentation_days))
      want = Phase::pre_retrain;
    CHECK(row.phase == want);
    if (i > 0)
      CHECK(row.time.minutes_since_epoch() ==
            r.intervals[i - 1].time.minutes_since_epoch() + 15);
  }

  // All three scores present and computed over at least one day each.
  CHECK(r.in_distribution.power_mape.n_days > 0);
  CHECK(r.pre_retrain.power_mape.n_days > 0);
  CHECK(r.post_retrain.power_mape.n_days > 0);

  CHECK(r.optimized_intervals ==
        static_cast<std::size_t>(cfg.deployment_days - cfg.ecm_start_day) *
            per_day);
  CHECK(r.feasible_intervals <= r.optimized_intervals);
  CHECK(r.met_intervals <= r.feasible_intervals);
  if (r.feasible_intervals > 0)
    CHECK(r.met_fraction ==
          static_cast<double>(r.met_intervals) /
              static_cast<double>(r.feasible_intervals));
}

TEST_CASE("legacy rows carry no optimizer claims") {
  const auto& r = small_report();
  const auto cfg = small_config();
  for (int i = 0; i < cfg.ecm_start_day * 96; ++i) {
    const auto& row = r.intervals[static_cast<std::size_t>(i)];
    CHECK(row.forecast_cooling_kw == 0.0);
    CHECK(row.predicted_power_kw == 0.0);
    CHECK_FALSE(row.optimizer_feasible);
    CHECK(row.met_profile);
    CHECK(row.demand_kw > 0.0);
  }
}

TEST_CASE("training spans never overlap their scoring windows") {
  const auto& r = small_report();
  const auto cfg = small_config();

  // v1 stops before the history holdout begins.
  const Timestamp holdout_begin = r.history_begin.plus_minutes(
      (cfg.history_days - cfg.holdout_days) * 1440);
  CHECK(r.v1_train_begin == r.history_begin);
  CHECK(r.v1_train_end < holdout_begin);
  CHECK(r.v1_train_end == holdout_begin.plus_minutes(-15));

  // Deployment starts one step after the history ends.
  CHECK(r.deployment_begin == r.history_end.plus_minutes(15));

  // v2 trains through the augmentation window and no further; the window
  // it is scored on starts right after.
  const Timestamp post_begin = r.deployment_begin.plus_minutes(
      (cfg.ecm_start_day + cfg.augmentation_days) * 1440);
  CHECK(r.v2_train_begin == r.history_begin);
  CHECK(r.v2_train_end == post_begin.plus_minutes(-15));

  // v1 is scored pre-retrain on intervals past its training span.
  const Timestamp ecm_begin =
      r.deployment_begin.plus_minutes(cfg.ecm_start_day * 1440);
  CHECK(r.v1_train_end < ecm_begin);
}

TEST_CASE("savings accounting matches the interval log") {
  const auto& r = small_report();
  const auto cfg = small_config();

  CHECK(r.savings.method == BaselineKind::linear_daily);
  CHECK(r.savings.detail.size() ==
        static_cast<std::size_t>(cfg.deployment_days - cfg.ecm_start_day));
  CHECK(r.savings.avoided_kwh ==
        r.savings.adjusted_baseline_kwh - r.savings.metered_kwh);

  const Timestamp ecm_begin =
      r.deployment_begin.plus_minutes(cfg.ecm_start_day * 1440);
  CHECK(r.savings.reporting_begin == ecm_begin);

  double metered = 0.0;
  for (const auto& row : r.intervals)
    if (row.phase != Phase::legacy) metered += row.realized_power_kw * 0.25;
  CHECK(r.savings.metered_kwh == doctest::Approx(metered).epsilon(1e-9));

  CHECK(std::isfinite(r.naive_savings_pct));
  CHECK(std::isfinite(r.counterfactual_savings_pct));
}

TEST_CASE("stability summary rides along") {
  const auto& r = small_report();
  CHECK(r.stability.ga.rows.size() == 10);
  CHECK(r.stability.pso.rows.size() == 10);
  CHECK(r.stability.ga.mean_fitness > 0.0);
}

TEST_CASE("replay is deterministic") {
  const auto& first = small_report();
  const auto second = run_experiment(small_config());

  CHECK(second.in_distribution.power_mape.mape_pct ==
        first.in_distribution.power_mape.mape_pct);
  CHECK(second.pre_retrain.power_mape.mape_pct ==
        first.pre_retrain.power_mape.mape_pct);
  CHECK(second.post_retrain.power_mape.mape_pct ==
        first.post_retrain.power_mape.mape_pct);
  CHECK(second.savings.savings_pct == first.savings.savings_pct);
  CHECK(second.met_fraction == first.met_fraction);
  REQUIRE(second.intervals.size() == first.intervals.size());
  for (std::size_t i = 0; i < first.intervals.size(); i += 97) {
    CHECK(second.intervals[i].realized_power_kw ==
          first.intervals[i].realized_power_kw);
    CHECK(second.intervals[i].setpoints == first.intervals[i].setpoints);
  }

  TempFile a("chillopt_test_loop_a.json"), b("chillopt_test_loop_b.json");
  write_closed_loop_json(a.path, first);
  write_closed_loop_json(b.path, second);
  CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("step limit caps continuous moves between intervals") {
  auto cfg = small_config();
  cfg.deployment_days = 3;
  cfg.ecm_start_day = 0;
  cfg.step_limit_fraction = 0.05;
  const auto r = run_experiment(cfg);

  const auto bounds = default_bounds(cfg.plant);
  std::vector<double> prev;
  for (const auto& row : r.intervals) {
    const auto cur = row.setpoints.flatten();
    if (!prev.empty()) {
      for (std::size_t j = 0; j < bounds.size(); ++j) {
        if (bounds[j].discrete) continue;
        const double allowed =
            cfg.step_limit_fraction * (bounds[j].hi - bounds[j].lo);
        const double p = prev[j], n = cur[j];
        if (p == 0.0) {
          // Turn-on enters at the bottom of the box.
          if (n != 0.0) CHECK(n <= bounds[j].lo + allowed + 1e-9);
        } else if (n == 0.0) {
          CHECK(p <= bounds[j].lo + allowed + 1e-9);
        } else {
          CHECK(std::abs(n - p) <= allowed + 1e-9);
        }
      }
    }
    prev = cur;
  }
}

TEST_CASE("reports write as JSON and CSV") {
  const auto& r = small_report();
  const auto cfg = small_config();

  TempFile jsonf("chillopt_test_loop.json");
  write_closed_loop_json(jsonf.path, r);
  std::ifstream jin(jsonf.path);
  nlohmann::json j;
  jin >> j;
  CHECK(j.at("surrogate").at("in_distribution").at("power").at("mape_pct")
            .get<double>() == r.in_distribution.power_mape.mape_pct);
  CHECK(j.at("surrogate").at("drift_pre_retrain").get<double>() ==
        r.drift_pre_retrain);
  CHECK(j.at("savings").at("savings_pct").get<double>() ==
        r.savings.savings_pct);
  CHECK(j.at("delivery").at("met_fraction").get<double>() == r.met_fraction);
  CHECK(j.at("stability").at("ga").at("rows").size() == 10);
  CHECK(j.at("spans").at("deployment_begin") ==
        r.deployment_begin.to_string());

  TempFile csvf("chillopt_test_loop_intervals.csv");
  write_interval_log_csv(csvf.path, cfg.plant, r);
  std::ifstream cin_(csvf.path);
  std::string header;
  REQUIRE(std::getline(cin_, header));
  CHECK(header.find("timestamp,phase,forecast_cooling_kw,demand_kw") == 0);
  CHECK(header.find("chiller1_on") != std::string::npos);
  CHECK(header.find("met_profile") != std::string::npos);
  std::size_t rows = 0;
  std::string line;
  while (std::getline(cin_, line)) ++rows;
  CHECK(rows == r.intervals.size());

  TempFile mapef("chillopt_test_loop_mape.csv");
  write_mape_phases_csv(mapef.path, r);
  const auto text = slurp(mapef.path);
  CHECK(text.find("in_distribution") != std::string::npos);
  CHECK(text.find("pre_retrain") != std::string::npos);
  CHECK(text.find("post_retrain") != std::string::npos);

  CHECK_THROWS_AS(write_closed_loop_json("/nonexistent/dir/r.json", r),
                  std::runtime_error);
}

}  // TEST_SUITE
