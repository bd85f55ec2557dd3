// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-interval setpoint search: minimize predicted electrical power subject
// to delivering a target cooling value, with shortfall priced as a linear
// penalty. The genetic algorithm is the production path; particle swarm is
// kept as the faster but less stable comparator.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chillopt/forecaster.hpp"
#include "chillopt/plant.hpp"
#include "chillopt/surrogate.hpp"
#include "chillopt/timeseries.hpp"

namespace chillopt {

// Per-slot search box in SetpointVector::flatten order. Discrete slots only
// ever take the values 0 and 1.
struct SlotBounds {
  double lo = 0.0;
  double hi = 1.0;
  bool discrete = false;
};

// The map under optimization: candidate plus weather to (power, cooling).
// Production code wires this to SurrogateModel::predict; tests substitute
// the true plant or analytic functions.
using PlantMap =
    std::function<PlantOutput(const SetpointVector&, const WeatherRecord&)>;

struct OptProblem {
  PlantMap map;
  PlantConfig cfg;  // defines the slot layout for flatten/unflatten
  WeatherRecord weather;
  double target_cooling_kw = 0.0;
  std::vector<SlotBounds> bounds;
  double shortfall_tolerance = 0.02;  // feasibility band as fraction
  double penalty_weight = 10.0;       // kW of fitness per kW of shortfall
};

// Search boxes mirroring the setpoint invariants: on-flags discrete, chw in
// [5, 11], pump speed in [0.3, 1], tower fan in [0.2, 1].
std::vector<SlotBounds> default_bounds(const PlantConfig& cfg);

// Problem evaluating candidates on a trained surrogate.
OptProblem make_surrogate_problem(const SurrogateModel& model,
                                  const PlantConfig& cfg,
                                  const WeatherRecord& weather,
                                  double target_cooling_kw);

// Problem evaluating candidates on the true plant; the demand fed to
// plant_step is the cooling target itself.
OptProblem make_plant_problem(const PlantConfig& cfg,
                              const WeatherRecord& weather,
                              double target_cooling_kw);

// The fixed benchmark the stability comparison is quoted on: the default
// plant at 30 C / 60% RH delivering 3000 kW.
OptProblem default_benchmark_problem();

// power + penalty_weight * max(0, target - cooling). Lower is better.
// A continuous slot must lie inside its box or at the canonical off value
// 0; discrete slots must be exactly 0 or 1. Violations throw.
double fitness(const OptProblem& problem, const SetpointVector& candidate);

struct GAConfig {
  std::size_t population = 64;  // must be even
  int generations = 200;
  std::size_t tournament = 3;
  double crossover_rate = 0.9;
  double mutation_rate = 0.0;  // 0 means 1/dimension
  double mutation_scale = 0.1;  // of slot range, for continuous slots
  std::size_t elitism = 2;
  std::uint64_t seed = 1;
};

struct PSOConfig {
  std::size_t swarm = 64;
  int iterations = 200;
  double inertia = 0.72;
  double cognitive = 1.49;
  double social = 1.49;
  std::uint64_t seed = 1;
};

struct OptResult {
  SetpointVector best_setpoints;
  PlantOutput predicted;
  double fitness = 0.0;
  bool feasible = false;  // cooling >= (1 - tolerance) * target
  std::size_t evaluations = 0;
  std::vector<double> trace;  // best fitness so far, one entry per round
};

// Tournament selection, uniform crossover, Gaussian mutation with boundary
// reflection on continuous slots and bit flips on discrete ones, elitism.
// Evaluates population * generations candidates. Deterministic per seed.
OptResult ga_optimize(const OptProblem& problem, const GAConfig& config);

// Same, but the first individual of the initial population is replaced by
// the given flattened candidate (clamped into bounds).
OptResult ga_optimize(const OptProblem& problem, const GAConfig& config,
                      std::span<const double> warm_start);

// Global-best particle swarm. Discrete slots relax to a continuous value
// whose sigmoid is thresholded at one half when building candidates.
// Evaluates swarm * iterations candidates. Deterministic per seed.
OptResult pso_optimize(const OptProblem& problem, const PSOConfig& config);

struct StabilityRow {
  std::uint64_t seed = 0;
  double best_fitness = 0.0;
  std::size_t evals_to_5pct = 0;  // evaluations until within 5% of own best
};

struct StabilitySummary {
  std::vector<StabilityRow> rows;
  double mean_fitness = 0.0;
  double std_fitness = 0.0;  // sample standard deviation
  double cv_fitness = 0.0;   // std / mean
  double mean_evals_to_5pct = 0.0;
};

struct StabilityReport {
  StabilitySummary ga;
  StabilitySummary pso;
};

// Runs both optimizers over n_seeds consecutive seeds at identical
// evaluation budgets and summarizes the spread of their best fitness.
StabilityReport stability_report(const OptProblem& problem,
                                 const GAConfig& ga, const PSOConfig& pso,
                                 int n_seeds);

struct ProfileOptConfig {
  GAConfig ga;
  // Seed each interval's population with the previous interval's best.
  bool warm_start = true;
};

// Independent per-interval optimization of a whole cooling profile against
// the surrogate. Intervals with absent weather or profile values are
// rejected; infeasible intervals are flagged in their result and the run
// continues.
std::vector<OptResult> optimize_profile(const SurrogateModel& model,
                                        const PlantConfig& cfg,
                                        const WeatherSeries& weather,
                                        const CoolingProfile& profile,
                                        const ProfileOptConfig& config = {});

// Map variant that also sees the interval's cooling target, so the true
// plant can serve as the model: wire it to plant_step with the target as
// demand.
using TargetAwareMap = std::function<PlantOutput(
    const SetpointVector&, const WeatherRecord&, double target_kw)>;

// Same loop against an arbitrary map, e.g. the true plant as an oracle.
std::vector<OptResult> optimize_profile(const TargetAwareMap& map,
                                        const PlantConfig& cfg,
                                        const WeatherSeries& weather,
                                        const CoolingProfile& profile,
                                        const ProfileOptConfig& config = {});

// CSV export: timestamp, one column per setpoint slot, then
// predicted_power_kw, predicted_cooling_kw, feasible.
void write_recommendations_csv(const std::string& path, const PlantConfig& cfg,
                               const Timestamp& start, int step_minutes,
                               const std::vector<OptResult>& results);

}  // namespace chillopt
