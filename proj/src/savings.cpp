// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/savings.hpp"

#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "chillopt/csv.hpp"

namespace chillopt {

namespace {

constexpr std::string_view kNeedDays =
    "baseline needs at least 60 days of history";
constexpr std::string_view kNeedMonths =
    "baseline needs at least 6 months of history";

double step_hours(int step_minutes) { return step_minutes / 60.0; }

Granularity granularity_of(BaselineKind kind) {
  return kind == BaselineKind::linear_monthly ? Granularity::monthly
                                              : Granularity::daily;
}

std::int64_t bucket_key(const Timestamp& t, Granularity g) {
  return g == Granularity::daily ? t.day_index() : t.month_key();
}

Timestamp bucket_start_of(std::int64_t key, Granularity g) {
  if (g == Granularity::daily) return Timestamp::from_minutes(key * 1440);
  const int year = static_cast<int>(key / 12);
  const int month = static_cast<int>(key % 12) + 1;
  return Timestamp::civil(year, month, 1);
}

std::int64_t slots_in_bucket(std::int64_t key, Granularity g,
                             int step_minutes) {
  if (g == Granularity::daily) return 1440 / step_minutes;
  const int year = static_cast<int>(key / 12);
  const int month = static_cast<int>(key % 12) + 1;
  const int next_year = month == 12 ? year + 1 : year;
  const int next_month = month == 12 ? 1 : month + 1;
  const std::int64_t days = days_from_civil(next_year, next_month, 1) -
                            days_from_civil(year, month, 1);
  return days * (1440 / step_minutes);
}

struct BucketAccum {
  double temp_sum = 0.0;
  double power_sum = 0.0;
  std::int64_t count = 0;
};

// Calendar buckets of the present slots; throws unless every touched
// bucket is completely covered, so partial days or months never skew an
// energy total. temp_of/power_of may return nothing to mark absence.
template <typename R, typename TempFn, typename PowerFn>
std::map<std::int64_t, BucketAccum> complete_buckets(
    const TimeSeries<R>& series, Granularity g, TempFn temp_of,
    PowerFn power_of) {
  std::map<std::int64_t, BucketAccum> buckets;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series.records[i]) continue;
    const auto& rec = *series.records[i];
    auto& b = buckets[bucket_key(series.time_at(i), g)];
    b.temp_sum += temp_of(rec);
    b.power_sum += power_of(rec);
    b.count += 1;
  }
  if (buckets.empty()) throw std::invalid_argument("empty input");
  for (const auto& [key, b] : buckets) {
    if (b.count != slots_in_bucket(key, g, series.step_minutes)) {
      throw std::runtime_error(g == Granularity::daily
                                   ? "conditions do not cover a whole day"
                                   : "conditions do not cover a whole month");
    }
  }
  return buckets;
}

AdjustedBaseline adjusted_linear(const BaselineModel& model,
                                 const WeatherSeries& conditions) {
  validate_series(conditions);
  const auto g = granularity_of(model.kind);
  const auto buckets = complete_buckets(
      conditions, g, [](const WeatherRecord& w) { return w.dry_bulb_c; },
      [](const WeatherRecord&) { return 0.0; });

  AdjustedBaseline out;
  const double h = step_hours(conditions.step_minutes);
  for (const auto& [key, b] : buckets) {
    const double mean_temp = b.temp_sum / static_cast<double>(b.count);
    const double kwh = predict_linear(model.linear, mean_temp) *
                       static_cast<double>(b.count) * h;
    out.buckets.push_back({bucket_start_of(key, g), kwh});
    out.total_kwh += kwh;
  }
  return out;
}

AdjustedBaseline adjusted_profile(const BaselineModel& model,
                                  const WeatherSeries& conditions,
                                  const OperationSeries& recent_history) {
  const auto forecast =
      forecast_profile(model.profile, conditions, recent_history);
  AdjustedBaseline out;
  const double h = step_hours(forecast.step_minutes);
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const double kwh = forecast.records[i].value_or(0.0) * h;
    out.buckets.push_back({forecast.time_at(i), kwh});
    out.total_kwh += kwh;
  }
  return out;
}

WeatherSeries weather_of(const OperationSeries& ops) {
  WeatherSeries w;
  w.start = ops.start;
  w.step_minutes = ops.step_minutes;
  w.records.reserve(ops.size());
  for (const auto& rec : ops.records) {
    if (rec)
      w.records.push_back(rec->weather);
    else
      w.records.push_back(std::nullopt);
  }
  return w;
}

SavingsReport finish_report(const BaselineModel& model,
                            const OperationSeries& reporting,
                            AdjustedBaseline adjusted,
                            std::vector<double> metered_kwh) {
  SavingsReport report;
  report.method = model.kind;
  report.reporting_begin = reporting.time_at(0);
  report.reporting_end = reporting.time_at(reporting.size() - 1);
  report.adjusted_baseline_kwh = adjusted.total_kwh;
  report.detail.reserve(adjusted.buckets.size());
  for (std::size_t i = 0; i < adjusted.buckets.size(); ++i) {
    report.metered_kwh += metered_kwh[i];
    report.detail.push_back({adjusted.buckets[i].bucket_start,
                             adjusted.buckets[i].kwh, metered_kwh[i]});
  }
  report.avoided_kwh = report.adjusted_baseline_kwh - report.metered_kwh;
  report.savings_pct =
      report.adjusted_baseline_kwh > 0.0
          ? 100.0 * report.avoided_kwh / report.adjusted_baseline_kwh
          : 0.0;
  return report;
}

SavingsReport avoided_linear(const BaselineModel& model,
                             const OperationSeries& reporting) {
  const auto g = granularity_of(model.kind);
  const auto buckets = complete_buckets(
      reporting, g,
      [](const OperationRecord& r) { return r.weather.dry_bulb_c; },
      [](const OperationRecord& r) { return r.output.power_kw; });

  AdjustedBaseline adjusted;
  std::vector<double> metered;
  const double h = step_hours(reporting.step_minutes);
  for (const auto& [key, b] : buckets) {
    const double mean_temp = b.temp_sum / static_cast<double>(b.count);
    const double kwh = predict_linear(model.linear, mean_temp) *
                       static_cast<double>(b.count) * h;
    adjusted.buckets.push_back({bucket_start_of(key, g), kwh});
    adjusted.total_kwh += kwh;
    metered.push_back(b.power_sum * h);
  }
  return finish_report(model, reporting, std::move(adjusted),
                       std::move(metered));
}

SavingsReport avoided_profile(const BaselineModel& model,
                              const OperationSeries& reporting,
                              const OperationSeries& recent_history) {
  auto adjusted =
      adjusted_profile(model, weather_of(reporting), recent_history);
  std::vector<double> metered;
  metered.reserve(reporting.size());
  const double h = step_hours(reporting.step_minutes);
  for (const auto& rec : reporting.records)
    metered.push_back(rec ? rec->output.power_kw * h : 0.0);
  return finish_report(model, reporting, std::move(adjusted),
                       std::move(metered));
}

void check_after_baseline(const BaselineModel& model,
                          const OperationSeries& reporting) {
  validate_series(reporting);
  if (reporting.time_at(0) <= model.baseline_end)
    throw std::runtime_error("baseline/reporting overlap");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

std::string_view baseline_kind_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::linear_daily:
      return "linear_daily";
    case BaselineKind::linear_monthly:
      return "linear_monthly";
    case BaselineKind::profile_forecaster:
      return "profile_forecaster";
  }
  throw std::logic_error("unknown baseline kind");
}

BaselineModel fit_baseline(const OperationSeries& history, BaselineKind kind,
                           const MlpHyperparams& hp) {
  validate_series(history);

  std::set<std::int64_t> days, months;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (!history.records[i]) continue;
    const auto t = history.time_at(i);
    days.insert(t.day_index());
    months.insert(t.month_key());
  }
  if (kind == BaselineKind::linear_monthly) {
    if (months.size() < 6) throw std::invalid_argument(std::string(kNeedMonths));
  } else if (days.size() < 60) {
    throw std::invalid_argument(std::string(kNeedDays));
  }

  BaselineModel model;
  model.kind = kind;
  model.baseline_begin = history.time_at(0);
  model.baseline_end = history.time_at(history.size() - 1);

  if (kind == BaselineKind::profile_forecaster) {
    model.profile = fit_profile(history, TargetKind::power, hp);
    return model;
  }

  ScalarSeries temps, powers;
  temps.start = powers.start = history.start;
  temps.step_minutes = powers.step_minutes = history.step_minutes;
  for (const auto& rec : history.records) {
    if (rec) {
      temps.push(rec->weather.dry_bulb_c);
      powers.push(rec->output.power_kw);
    } else {
      temps.push_absent();
      powers.push_absent();
    }
  }
  model.linear = fit_linear(temps, powers, granularity_of(kind));
  return model;
}

AdjustedBaseline adjusted_baseline(const BaselineModel& model,
                                   const WeatherSeries& conditions) {
  if (model.kind == BaselineKind::profile_forecaster)
    throw std::invalid_argument("profile baseline needs recent history");
  return adjusted_linear(model, conditions);
}

AdjustedBaseline adjusted_baseline(const BaselineModel& model,
                                   const WeatherSeries& conditions,
                                   const OperationSeries& recent_history) {
  if (model.kind == BaselineKind::profile_forecaster)
    return adjusted_profile(model, conditions, recent_history);
  return adjusted_linear(model, conditions);
}

SavingsReport avoided_energy(const BaselineModel& model,
                             const OperationSeries& reporting) {
  if (model.kind == BaselineKind::profile_forecaster)
    throw std::invalid_argument("profile baseline needs recent history");
  check_after_baseline(model, reporting);
  return avoided_linear(model, reporting);
}

SavingsReport avoided_energy(const BaselineModel& model,
                             const OperationSeries& reporting,
                             const OperationSeries& recent_history) {
  check_after_baseline(model, reporting);
  if (model.kind == BaselineKind::profile_forecaster)
    return avoided_profile(model, reporting, recent_history);
  return avoided_linear(model, reporting);
}

double naive_savings(double baseline_kwh, double reporting_kwh) {
  if (baseline_kwh <= 0.0)
    throw std::invalid_argument("baseline energy must be positive");
  return 100.0 * (baseline_kwh - reporting_kwh) / baseline_kwh;
}

CrossvalResult linear_crossval(const OperationSeries& history_pre,
                               const OperationSeries& history_post) {
  CrossvalResult r;
  const auto daily = fit_baseline(history_pre, BaselineKind::linear_daily);
  r.daily_savings_pct = avoided_energy(daily, history_post).savings_pct;
  const auto monthly =
      fit_baseline(history_pre, BaselineKind::linear_monthly);
  r.monthly_savings_pct = avoided_energy(monthly, history_post).savings_pct;
  return r;
}

void write_savings_csv(const std::string& path, const SavingsReport& report) {
  auto out = open_out(path);
  out << "timestamp,adjusted_baseline_kwh,metered_kwh,avoided_kwh\n";
  for (const auto& row : report.detail) {
    out << row.bucket_start.to_string() << ','
        << format_double(row.adjusted_kwh) << ','
        << format_double(row.metered_kwh) << ','
        << format_double(row.adjusted_kwh - row.metered_kwh) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_savings_json(const std::string& path,
                        const SavingsReport& report) {
  nlohmann::json detail = nlohmann::json::array();
  for (const auto& row : report.detail) {
    detail.push_back({{"bucket_start", row.bucket_start.to_string()},
                      {"adjusted_kwh", row.adjusted_kwh},
                      {"metered_kwh", row.metered_kwh}});
  }
  const nlohmann::json j = {
      {"method", baseline_kind_name(report.method)},
      {"reporting_begin", report.reporting_begin.to_string()},
      {"reporting_end", report.reporting_end.to_string()},
      {"adjusted_baseline_kwh", report.adjusted_baseline_kwh},
      {"metered_kwh", report.metered_kwh},
      {"avoided_kwh", report.avoided_kwh},
      {"savings_pct", report.savings_pct},
      {"detail", detail},
  };
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_savings_plot_csv(const std::string& path,
                            const OperationSeries& baseline_history,
                            const SavingsReport& report) {
  validate_series(baseline_history);
  auto out = open_out(path);
  out << "timestamp,baseline_kwh,adjusted_baseline_kwh,metered_kwh\n";

  const double h = step_hours(baseline_history.step_minutes);
  if (report.method == BaselineKind::profile_forecaster) {
    for (std::size_t i = 0; i < baseline_history.size(); ++i) {
      const auto& rec = baseline_history.records[i];
      if (!rec) continue;
      out << baseline_history.time_at(i).to_string() << ','
          << format_double(rec->output.power_kw * h) << ",,\n";
    }
  } else {
    // Lenient calendar bucketing for the descriptive baseline curve;
    // partial edge buckets plot whatever energy they contain.
    const auto g = granularity_of(report.method);
    std::map<std::int64_t, double> kwh;
    for (std::size_t i = 0; i < baseline_history.size(); ++i) {
      const auto& rec = baseline_history.records[i];
      if (!rec) continue;
      kwh[bucket_key(baseline_history.time_at(i), g)] +=
          rec->output.power_kw * h;
    }
    for (const auto& [key, v] : kwh) {
      out << bucket_start_of(key, g).to_string() << ',' << format_double(v)
          << ",,\n";
    }
  }
  for (const auto& row : report.detail) {
    out << row.bucket_start.to_string() << ",,"
        << format_double(row.adjusted_kwh) << ','
        << format_double(row.metered_kwh) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace chillopt
