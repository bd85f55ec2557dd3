// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Whole-lifecycle experiment: operate a plant under the legacy policy long
// enough to train models, switch control over to optimizer recommendations,
// watch the surrogate degrade on the new operating patterns, retrain after
// an augmentation window, and account for the savings against a weather
// adjusted baseline. One seed drives the whole run.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chillopt/forecaster.hpp"
#include "chillopt/optimizer.hpp"
#include "chillopt/savings.hpp"
#include "chillopt/sim.hpp"
#include "chillopt/surrogate.hpp"

namespace chillopt {

struct ExperimentConfig {
  std::uint64_t seed = 1;

  // Days of legacy operation generated before the changeover. The last
  // holdout_days of it are scored, never trained on.
  int history_days = 540;
  int holdout_days = 30;

  // Days operated after the changeover. Recommendations switch on at
  // deployment day ecm_start_day; days before it stay on the legacy
  // policy. The augmentation window covers the first augmentation_days of
  // optimized operation, after which the surrogate is retrained. The
  // window must end strictly before the deployment does so the retrained
  // model has unseen intervals to be scored on.
  int deployment_days = 60;
  int augmentation_days = 14;
  int ecm_start_day = 0;

  // Largest move a continuous setpoint may make per interval, as a
  // fraction of its bound span. 0 disables the limit.
  double step_limit_fraction = 0.0;

  // Seeds for the stability summary attached to the report.
  int stability_seeds = 20;

  PlantConfig plant = PlantConfig::default_config();
  DemandModel demand;
  WeatherProfile weather;
  MlpHyperparams forecaster_hp;
  MlpHyperparams surrogate_hp;
  GAConfig ga;
  bool warm_start = true;
};

// Which regime produced a deployment interval.
enum class Phase { legacy, pre_retrain, post_retrain };

std::string phase_name(Phase phase);

struct IntervalLog {
  Timestamp time;
  Phase phase = Phase::legacy;
  double forecast_cooling_kw = 0.0;  // profile target; 0 on legacy rows
  double demand_kw = 0.0;            // exogenous building load
  SetpointVector setpoints;          // as applied to the plant
  double predicted_power_kw = 0.0;   // surrogate claim; 0 on legacy rows
  double realized_power_kw = 0.0;
  double realized_cooling_kw = 0.0;
  bool optimizer_feasible = false;  // the surrogate's feasibility claim
  bool met_profile = true;          // true plant delivered the target
};

struct ClosedLoopReport {
  // Surrogate quality per phase: the deployed model on the history
  // holdout, the same model on the augmentation window it has never seen,
  // and the retrained model on the optimized intervals after the window.
  SurrogateMetrics in_distribution;
  SurrogateMetrics pre_retrain;
  SurrogateMetrics post_retrain;
  double drift_pre_retrain = 0.0;   // pre_retrain vs in_distribution
  double drift_post_retrain = 0.0;  // post_retrain vs in_distribution

  // Savings over the optimized deployment window, against a daily linear
  // baseline fit on the legacy history. The naive figure compares raw
  // energy prorated by length; the counterfactual replays the same days
  // under the legacy policy, which only a simulation can know.
  SavingsReport savings;
  double naive_savings_pct = 0.0;
  double counterfactual_savings_pct = 0.0;

  // Delivery audit on the true plant, over optimized intervals only.
  std::size_t optimized_intervals = 0;
  std::size_t feasible_intervals = 0;
  std::size_t met_intervals = 0;
  double met_fraction = 0.0;  // met / feasible

  StabilityReport stability;

  // Training-span bookkeeping. Evaluation windows must not overlap the
  // spans of the models scored on them.
  Timestamp history_begin, history_end;
  Timestamp v1_train_begin, v1_train_end;
  Timestamp v2_train_begin, v2_train_end;
  Timestamp deployment_begin, deployment_end;

  std::vector<IntervalLog> intervals;
};

// Runs the four phases end to end: train on legacy history, deploy
// recommendations against the true plant, retrain after the augmentation
// window, and account for savings. Each optimized interval is dispatched
// to its forecast target once a nameplate staffing guard has confirmed the
// staged capacity and pump flow can carry it; the surrogate has no say
// over rated limits. Deterministic per config. Sub-step failures are
// rethrown with the phase named.
ClosedLoopReport run_experiment(const ExperimentConfig& config);

// post power MAPE over pre power MAPE. Throws "degenerate reference" when
// the pre MAPE is zero.
double drift_metric(const SurrogateMetrics& pre, const SurrogateMetrics& post);

// Summary without per-interval rows; those go to the CSV log.
void write_closed_loop_json(const std::string& path,
                            const ClosedLoopReport& report);

// One row per deployment interval, phase tagged, setpoints in canonical
// slot order.
void write_interval_log_csv(const std::string& path, const PlantConfig& cfg,
                            const ClosedLoopReport& report);

// Three rows: in_distribution, pre_retrain, post_retrain.
void write_mape_phases_csv(const std::string& path,
                           const ClosedLoopReport& report);

}  // namespace chillopt
