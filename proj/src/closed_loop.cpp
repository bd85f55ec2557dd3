// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "chillopt/csv.hpp"

namespace chillopt {

namespace {

constexpr int kSlotsPerDay = 1440 / 15;

void check_config(const ExperimentConfig& config) {
  config.plant.validate();
  if (config.holdout_days < 7)
    throw std::invalid_argument("holdout must cover at least 7 days");
  if (config.history_days - config.holdout_days < 60)
    throw std::invalid_argument("history must leave at least 60 training days");
  if (config.deployment_days < 1)
    throw std::invalid_argument("deployment must cover at least one day");
  if (config.augmentation_days < 1)
    throw std::invalid_argument("augmentation window must cover at least one day");
  if (config.ecm_start_day < 0)
    throw std::invalid_argument("changeover day cannot be negative");
  if (config.ecm_start_day + config.augmentation_days >= config.deployment_days)
    throw std::invalid_argument(
        "augmentation window must end before deployment does");
  if (config.step_limit_fraction < 0.0 || config.step_limit_fraction > 1.0)
    throw std::invalid_argument("step limit fraction must lie in [0, 1]");
}

OperationSeries slice_days(const OperationSeries& ops, int from_day,
                           int n_days) {
  OperationSeries out;
  out.step_minutes = ops.step_minutes;
  const std::size_t begin =
      static_cast<std::size_t>(from_day) * kSlotsPerDay;
  out.start = ops.time_at(begin);
  const std::size_t end =
      begin + static_cast<std::size_t>(n_days) * kSlotsPerDay;
  out.records.assign(ops.records.begin() + static_cast<std::ptrdiff_t>(begin),
                     ops.records.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

OperationSeries window_before(const OperationSeries& ops, std::size_t end,
                              std::size_t n) {
  OperationSeries out;
  out.step_minutes = ops.step_minutes;
  const std::size_t begin = end - n;
  out.start = ops.time_at(begin);
  out.records.assign(ops.records.begin() + static_cast<std::ptrdiff_t>(begin),
                     ops.records.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

double series_kwh(const OperationSeries& ops) {
  double kwh = 0.0;
  for (const auto& rec : ops.records)
    if (rec) kwh += rec->output.power_kw * ops.step_minutes / 60.0;
  return kwh;
}

// Pulls the applied point toward the previous one so no continuous slot
// moves more than fraction * span per interval. Off is the canonical 0, so
// switching on enters at the low bound side and switching off is allowed
// only once the slot has walked down to it. Discrete slots are exempt:
// staging changes have no fractional version.
// One continuous slot tied to its unit's on flag, both states canonical.
// An entering unit starts at the bottom of its box; a unit may switch off
// only once its slot sits within one step of the bottom, and otherwise
// stays on and keeps walking down. On-to-on moves clamp to one step.
void limit_slot(const SlotBounds& b, double fraction, std::uint8_t was_on,
                double was_v, std::uint8_t& on, double& v) {
  const double allowed = fraction * (b.hi - b.lo);
  if (!was_on) {
    if (on) v = std::min(v, b.lo + allowed);
  } else if (!on) {
    if (was_v - b.lo > allowed + 1e-12) {
      on = 1;
      v = was_v - allowed;
    }
  } else {
    v = std::clamp(v, was_v - allowed, was_v + allowed);
  }
}

SetpointVector limit_step(const PlantConfig& cfg,
                          const std::vector<SlotBounds>& bounds,
                          const SetpointVector& prev, SetpointVector next,
                          double fraction) {
  const std::size_t n = cfg.n_chillers();
  const std::size_t m = cfg.n_pumps();
  const std::size_t k = cfg.n_towers();
  for (std::size_t i = 0; i < n; ++i)
    limit_slot(bounds[n + i], fraction, prev.chiller_on[i],
               prev.chw_supply_setpoint_c[i], next.chiller_on[i],
               next.chw_supply_setpoint_c[i]);
  for (std::size_t i = 0; i < m; ++i)
    limit_slot(bounds[2 * n + m + i], fraction, prev.pump_on[i],
               prev.pump_speed_frac[i], next.pump_on[i],
               next.pump_speed_frac[i]);
  for (std::size_t i = 0; i < k; ++i)
    limit_slot(bounds[2 * n + 2 * m + k + i], fraction, prev.tower_on[i],
               prev.tower_fan_frac[i], next.tower_on[i],
               next.tower_fan_frac[i]);
  return next;
}

// Band a repair may move a continuous slot into: one step around its
// previous canonical value, or up from the bottom of the box when the unit
// was off. fraction >= 1 means no limit.
double raise_ceiling(double prev, const SlotBounds& b, double fraction) {
  if (fraction >= 1.0) return b.hi;
  const double allowed = fraction * (b.hi - b.lo);
  if (prev == 0.0) return std::min(b.hi, b.lo + allowed);
  return std::min(b.hi, prev + allowed);
}

double raise_floor(double prev, const SlotBounds& b, double fraction) {
  if (fraction >= 1.0 || prev == 0.0) return b.lo;
  return std::max(b.lo, prev - fraction * (b.hi - b.lo));
}

// Dispatch guard: a plan only reaches the plant once enough rated chiller
// capacity and pump flow are staged to carry the target. This is catalogue
// arithmetic over the plant config, applied because the surrogate's cooling
// estimate has no authority over nameplate limits. Raises are deterministic
// and index ordered; with a step limit active they stay inside its band, so
// a gradual mode may knowingly undershoot. `prev` and `sp` are canonical.
void staff_for_target(const PlantConfig& cfg,
                      const std::vector<SlotBounds>& bounds,
                      SetpointVector& sp, double target_kw,
                      const SetpointVector& prev, double fraction) {
  if (target_kw <= 0.0) return;
  const std::size_t n = cfg.n_chillers();
  const std::size_t m = cfg.n_pumps();
  const std::size_t k = cfg.n_towers();

  double on_capacity = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (sp.chiller_on[i]) on_capacity += cfg.chillers[i].rated_cooling_kw;
  for (std::size_t i = 0; i < n && on_capacity < target_kw; ++i) {
    if (sp.chiller_on[i]) continue;
    const auto& b = bounds[n + i];
    const double was = prev.chw_supply_setpoint_c[i];
    sp.chiller_on[i] = 1;
    sp.chw_supply_setpoint_c[i] = std::clamp(
        7.0, raise_floor(was, b, fraction), raise_ceiling(was, b, fraction));
    on_capacity += cfg.chillers[i].rated_cooling_kw;
  }

  const double per_pump_kw =
      cfg.total_rated_cooling_kw() / static_cast<double>(n);
  const double needed_flow = target_kw / per_pump_kw;
  double flow = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (sp.pump_on[i]) flow += sp.pump_speed_frac[i];
  for (std::size_t i = 0; i < m && flow < needed_flow; ++i) {
    if (!sp.pump_on[i]) continue;
    const double ceiling =
        raise_ceiling(prev.pump_speed_frac[i], bounds[2 * n + m + i], fraction);
    const double raised =
        std::min(ceiling, sp.pump_speed_frac[i] + (needed_flow - flow));
    if (raised > sp.pump_speed_frac[i]) {
      flow += raised - sp.pump_speed_frac[i];
      sp.pump_speed_frac[i] = raised;
    }
  }
  for (std::size_t i = 0; i < m && flow < needed_flow; ++i) {
    if (sp.pump_on[i]) continue;
    const auto& b = bounds[2 * n + m + i];
    const double was = prev.pump_speed_frac[i];
    const double speed =
        std::clamp(needed_flow - flow, raise_floor(was, b, fraction),
                   raise_ceiling(was, b, fraction));
    sp.pump_on[i] = 1;
    sp.pump_speed_frac[i] = speed;
    flow += speed;
  }

  if (sp.n_on_towers() == 0) {
    const auto& b = bounds[2 * n + 2 * m + k];
    const double was = prev.tower_fan_frac[0];
    sp.tower_on[0] = 1;
    sp.tower_fan_frac[0] = std::clamp(
        0.9, raise_floor(was, b, fraction), raise_ceiling(was, b, fraction));
  }
}

template <typename Fn>
auto phase_guard(const char* label, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(label) + ": " + e.what());
  }
}

nlohmann::json mape_json(const MapeResult& m) {
  return {{"mape_pct", m.mape_pct},
          {"ci_halfwidth_pct", m.ci_halfwidth_pct},
          {"ci_level", m.ci_level},
          {"n_days", m.n_days},
          {"n_excluded", m.n_excluded}};
}

nlohmann::json surrogate_metrics_json(const SurrogateMetrics& m) {
  return {{"power", mape_json(m.power_mape)},
          {"cooling", mape_json(m.cooling_mape)},
          {"ood_fraction", m.ood_fraction}};
}

nlohmann::json stability_summary_json(const StabilitySummary& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : s.rows)
    rows.push_back({{"seed", row.seed},
                    {"best_fitness", row.best_fitness},
                    {"evals_to_5pct", row.evals_to_5pct}});
  return {{"mean_fitness", s.mean_fitness},
          {"std_fitness", s.std_fitness},
          {"cv_fitness", s.cv_fitness},
          {"mean_evals_to_5pct", s.mean_evals_to_5pct},
          {"rows", rows}};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

std::string phase_name(Phase phase) {
  switch (phase) {
    case Phase::legacy:
      return "legacy";
    case Phase::pre_retrain:
      return "pre_retrain";
    case Phase::post_retrain:
      return "post_retrain";
  }
  throw std::logic_error("unknown phase");
}

double drift_metric(const SurrogateMetrics& pre,
                    const SurrogateMetrics& post) {
  if (pre.power_mape.mape_pct == 0.0)
    throw std::invalid_argument("degenerate reference");
  return post.power_mape.mape_pct / pre.power_mape.mape_pct;
}

ClosedLoopReport run_experiment(const ExperimentConfig& config) {
  check_config(config);
  ClosedLoopReport report;

  // The world: weather, demand, and what the legacy policy would have done
  // for every day of the experiment. Deployment days reuse its weather and
  // demand; their legacy rows remain as the counterfactual.
  const int total_days = config.history_days + config.deployment_days;
  const OperationSeries world = phase_guard("phase 1 (history)", [&] {
    return generate_history(config.plant, config.seed, total_days,
                            config.demand, config.weather);
  });

  const OperationSeries history = slice_days(world, 0, config.history_days);
  const int train_days = config.history_days - config.holdout_days;
  const OperationSeries train_part = slice_days(world, 0, train_days);
  const OperationSeries holdout =
      slice_days(world, train_days, config.holdout_days);

  report.history_begin = history.time_at(0);
  report.history_end = history.time_at(history.size() - 1);

  // Phase 1: models from legacy operation only.
  ProfileForecaster fc;
  SurrogateModel v1;
  phase_guard("phase 1 (training)", [&] {
    fc = fit_profile(train_part, TargetKind::cooling, config.forecaster_hp);
    v1 = train_surrogate(train_part, config.surrogate_hp);
    report.in_distribution = evaluate_surrogate(v1, holdout);
    return 0;
  });
  report.v1_train_begin = train_part.time_at(0);
  report.v1_train_end = train_part.time_at(train_part.size() - 1);

  // Phase 2: deployment, advised by v1 throughout. Every observed interval,
  // legacy or optimized, is appended to `observed`; retraining sees exactly
  // this series. The retrained model is scored on the operation that
  // follows the augmentation window, not handed the controls mid-run: the
  // deployment stays one consistent policy, so the recovery measurement is
  // taken on the distribution the retrain actually sampled.
  OperationSeries observed = history;
  std::optional<SurrogateModel> v2;
  const std::vector<SlotBounds> bounds = default_bounds(config.plant);
  const double tolerance = OptProblem{}.shortfall_tolerance;
  const int aug_end_day = config.ecm_start_day + config.augmentation_days;
  // Step limits measure against what the plant last ran, which at
  // changeover is the final legacy interval.
  SetpointVector prev_sp =
      history.records[history.size() - 1]->setpoints.canonicalized();
  report.intervals.reserve(
      static_cast<std::size_t>(config.deployment_days) * kSlotsPerDay);

  for (int d = 0; d < config.deployment_days; ++d) {
    const std::size_t base =
        static_cast<std::size_t>(config.history_days + d) * kSlotsPerDay;

    if (d < config.ecm_start_day) {
      for (int s = 0; s < kSlotsPerDay; ++s) {
        const auto& rec = *world.records[base + static_cast<std::size_t>(s)];
        observed.push(rec);
        IntervalLog log;
        log.time = world.time_at(base + static_cast<std::size_t>(s));
        log.phase = Phase::legacy;
        log.demand_kw = rec.demand_kw;
        log.setpoints = rec.setpoints;
        log.realized_power_kw = rec.output.power_kw;
        log.realized_cooling_kw = rec.output.cooling_kw;
        report.intervals.push_back(std::move(log));
        prev_sp = rec.setpoints.canonicalized();
      }
      continue;
    }

    if (d == aug_end_day) {
      phase_guard("phase 3 (retraining)", [&] {
        v2 = train_surrogate(observed, config.surrogate_hp);
        return 0;
      });
      report.v2_train_begin = observed.time_at(0);
      report.v2_train_end = observed.time_at(observed.size() - 1);
    }

    // Day-ahead plan: forecast the cooling profile from observed lags and
    // the day's weather, then optimize each interval on the surrogate.
    WeatherSeries day_weather;
    day_weather.start = world.time_at(base);
    day_weather.step_minutes = world.step_minutes;
    for (int s = 0; s < kSlotsPerDay; ++s)
      day_weather.records.push_back(
          world.records[base + static_cast<std::size_t>(s)]->weather);

    // Lag features come from the metered building load, not from what the
    // optimized plant delivered; delivery tracks the forecast and would
    // otherwise feed the forecaster its own output.
    const CoolingProfile profile = phase_guard("phase 2 (forecast)", [&] {
      const auto recent = window_before(
          world, base, static_cast<std::size_t>(fc.lag_window()));
      return forecast_profile(fc, day_weather, recent);
    });
    const std::vector<OptResult> plan =
        phase_guard("phase 2 (deployment)", [&] {
          ProfileOptConfig opt;
          opt.ga = config.ga;
          opt.warm_start = config.warm_start;
          return optimize_profile(v1, config.plant, day_weather,
                                  profile, opt);
        });

    for (int s = 0; s < kSlotsPerDay; ++s) {
      const std::size_t i = base + static_cast<std::size_t>(s);
      const auto& r = plan[static_cast<std::size_t>(s)];
      const WeatherRecord w = world.records[i]->weather;
      const double demand = world.records[i]->demand_kw;
      const double target =
          std::max(0.0, *profile.records[static_cast<std::size_t>(s)]);
      SetpointVector sp = r.best_setpoints.canonicalized();
      if (config.step_limit_fraction > 0.0)
        sp = limit_step(config.plant, bounds, prev_sp, std::move(sp),
                        config.step_limit_fraction);
      staff_for_target(config.plant, bounds, sp, target, prev_sp,
                       config.step_limit_fraction > 0.0
                           ? config.step_limit_fraction
                           : 1.0);

      // The surrogate's claim at the point actually applied.
      const PlantOutput guess = predict(v1, sp, w);
      const double predicted = guess.power_kw;
      const bool claimed =
          guess.cooling_kw >= (1.0 - tolerance) * target - 1e-9;

      // The plant serves the profile it was dispatched for; the realized
      // row is both the delivery audit and the retraining observation.
      const PlantOutput realized = plant_step(config.plant, w, sp, target);
      const bool met =
          realized.cooling_kw >= (1.0 - tolerance) * target - 1e-9;
      observed.push(OperationRecord{w, sp, realized, target});
      prev_sp = sp;

      IntervalLog log;
      log.time = world.time_at(i);
      log.phase = d < aug_end_day ? Phase::pre_retrain : Phase::post_retrain;
      log.forecast_cooling_kw = target;
      log.demand_kw = demand;
      log.setpoints = std::move(sp);
      log.predicted_power_kw = predicted;
      log.realized_power_kw = realized.power_kw;
      log.realized_cooling_kw = realized.cooling_kw;
      log.optimizer_feasible = claimed;
      log.met_profile = met;
      report.intervals.push_back(std::move(log));

      ++report.optimized_intervals;
      if (claimed) {
        ++report.feasible_intervals;
        if (met) ++report.met_intervals;
      }
    }
  }

  report.deployment_begin = world.time_at(
      static_cast<std::size_t>(config.history_days) * kSlotsPerDay);
  report.deployment_end = world.time_at(world.size() - 1);
  report.met_fraction =
      report.feasible_intervals == 0
          ? 0.0
          : static_cast<double>(report.met_intervals) /
                static_cast<double>(report.feasible_intervals);

  // Scoring windows. The deployed model is scored on the augmentation
  // window it never trained on; the retrained model on the optimized
  // intervals after the window, which postdate its training span.
  const OperationSeries aug_window = slice_days(
      observed, config.history_days + config.ecm_start_day,
      config.augmentation_days);
  const OperationSeries post_window = slice_days(
      observed, config.history_days + aug_end_day,
      config.deployment_days - aug_end_day);
  phase_guard("phase 3 (scoring)", [&] {
    report.pre_retrain = evaluate_surrogate(v1, aug_window);
    report.post_retrain = evaluate_surrogate(*v2, post_window);
    return 0;
  });
  report.drift_pre_retrain =
      drift_metric(report.in_distribution, report.pre_retrain);
  report.drift_post_retrain =
      drift_metric(report.in_distribution, report.post_retrain);

  // Phase 4: savings for the optimized window against the legacy baseline.
  phase_guard("phase 4 (savings)", [&] {
    const auto baseline = fit_baseline(history, BaselineKind::linear_daily);
    const int opt_days = config.deployment_days - config.ecm_start_day;
    const OperationSeries reporting = slice_days(
        observed, config.history_days + config.ecm_start_day, opt_days);
    report.savings = avoided_energy(baseline, reporting);

    const double history_kwh = series_kwh(history);
    report.naive_savings_pct = naive_savings(
        history_kwh * opt_days / config.history_days,
        report.savings.metered_kwh);

    const OperationSeries legacy_same_days = slice_days(
        world, config.history_days + config.ecm_start_day, opt_days);
    const double counterfactual_kwh = series_kwh(legacy_same_days);
    report.counterfactual_savings_pct =
        100.0 * (counterfactual_kwh - report.savings.metered_kwh) /
        counterfactual_kwh;
    return 0;
  });

  report.stability = phase_guard("phase 4 (stability)", [&] {
    return stability_report(default_benchmark_problem(), GAConfig{},
                            PSOConfig{}, config.stability_seeds);
  });

  return report;
}

void write_closed_loop_json(const std::string& path,
                            const ClosedLoopReport& report) {
  nlohmann::json j;
  j["surrogate"] = {
      {"in_distribution", surrogate_metrics_json(report.in_distribution)},
      {"pre_retrain", surrogate_metrics_json(report.pre_retrain)},
      {"post_retrain", surrogate_metrics_json(report.post_retrain)},
      {"drift_pre_retrain", report.drift_pre_retrain},
      {"drift_post_retrain", report.drift_post_retrain}};
  j["savings"] = {
      {"method", baseline_kind_name(report.savings.method)},
      {"reporting_begin", report.savings.reporting_begin.to_string()},
      {"reporting_end", report.savings.reporting_end.to_string()},
      {"adjusted_baseline_kwh", report.savings.adjusted_baseline_kwh},
      {"metered_kwh", report.savings.metered_kwh},
      {"avoided_kwh", report.savings.avoided_kwh},
      {"savings_pct", report.savings.savings_pct},
      {"naive_savings_pct", report.naive_savings_pct},
      {"counterfactual_savings_pct", report.counterfactual_savings_pct}};
  j["delivery"] = {{"optimized_intervals", report.optimized_intervals},
                   {"feasible_intervals", report.feasible_intervals},
                   {"met_intervals", report.met_intervals},
                   {"met_fraction", report.met_fraction}};
  j["stability"] = {{"ga", stability_summary_json(report.stability.ga)},
                    {"pso", stability_summary_json(report.stability.pso)}};
  j["spans"] = {
      {"history_begin", report.history_begin.to_string()},
      {"history_end", report.history_end.to_string()},
      {"v1_train_begin", report.v1_train_begin.to_string()},
      {"v1_train_end", report.v1_train_end.to_string()},
      {"v2_train_begin", report.v2_train_begin.to_string()},
      {"v2_train_end", report.v2_train_end.to_string()},
      {"deployment_begin", report.deployment_begin.to_string()},
      {"deployment_end", report.deployment_end.to_string()}};

  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_interval_log_csv(const std::string& path, const PlantConfig& cfg,
                            const ClosedLoopReport& report) {
  auto out = open_out(path);
  out << "timestamp,phase,forecast_cooling_kw,demand_kw";
  for (const auto& name : setpoint_slot_names(cfg)) out << ',' << name;
  out << ",predicted_power_kw,realized_power_kw,realized_cooling_kw,"
         "optimizer_feasible,met_profile\n";
  for (const auto& row : report.intervals) {
    out << row.time.to_string() << ',' << phase_name(row.phase) << ','
        << format_double(row.forecast_cooling_kw) << ','
        << format_double(row.demand_kw);
    for (double v : row.setpoints.canonicalized().flatten())
      out << ',' << format_double(v);
    out << ',' << format_double(row.predicted_power_kw) << ','
        << format_double(row.realized_power_kw) << ','
        << format_double(row.realized_cooling_kw) << ','
        << (row.optimizer_feasible ? 1 : 0) << ','
        << (row.met_profile ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_mape_phases_csv(const std::string& path,
                           const ClosedLoopReport& report) {
  auto out = open_out(path);
  out << "phase,power_mape_pct,power_ci_halfwidth_pct,cooling_mape_pct,"
         "cooling_ci_halfwidth_pct,ood_fraction,n_days\n";
  const auto row = [&](const std::string& name, const SurrogateMetrics& m) {
    out << name << ',' << format_double(m.power_mape.mape_pct) << ','
        << format_double(m.power_mape.ci_halfwidth_pct) << ','
        << format_double(m.cooling_mape.mape_pct) << ','
        << format_double(m.cooling_mape.ci_halfwidth_pct) << ','
        << format_double(m.ood_fraction) << ',' << m.power_mape.n_days
        << '\n';
  };
  row("in_distribution", report.in_distribution);
  row("pre_retrain", report.pre_retrain);
  row("post_retrain", report.post_retrain);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace chillopt
