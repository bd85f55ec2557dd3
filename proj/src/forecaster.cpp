// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "model_json.hpp"

namespace chillopt {

namespace {

double target_of(const OperationRecord& rec, TargetKind kind) {
  return kind == TargetKind::cooling ? rec.output.cooling_kw
                                     : rec.output.power_kw;
}

const std::vector<int> kDefaultLags = {1, 2, 3, 4, 8, 96};

// Feature layout: dry bulb, humidity, clock encoding, day type, then one
// slot per lag.
constexpr std::size_t kBaseFeatures = 5;

void fill_features(const WeatherRecord& w, const Timestamp& t,
                   std::span<const double> lag_values,
                   std::span<double> out) {
  const double hour = t.hour() + t.minute() / 60.0;
  const double angle = 2.0 * std::numbers::pi * hour / 24.0;
  out[0] = w.dry_bulb_c;
  out[1] = w.rel_humidity_pct;
  out[2] = std::sin(angle);
  out[3] = std::cos(angle);
  out[4] = t.weekday() < 5 ? 1.0 : 0.0;
  std::copy(lag_values.begin(), lag_values.end(), out.begin() + kBaseFeatures);
}

double predict_one(const ProfileForecaster& fc, const WeatherRecord& w,
                   const Timestamp& t, std::span<const double> lag_values,
                   MlpWorkspace& ws, std::vector<double>& row) {
  row.resize(kBaseFeatures + fc.lags.size());
  fill_features(w, t, lag_values, row);
  fc.input_scaler.normalize(row);
  double y = 0.0;
  mlp_forward(fc.net, row, {&y, 1}, ws);
  return std::max(y * fc.target_scale + fc.target_mean, 0.0);
}

// Slots until the next midnight boundary at or after index 0.
std::size_t first_midnight_slot(const OperationSeries& ops) {
  const std::int64_t m = ops.start.minutes_since_epoch();
  const std::int64_t rem = ((m % 1440) + 1440) % 1440;
  if (rem == 0) return 0;
  return static_cast<std::size_t>((1440 - rem) / ops.step_minutes);
}

// Day-by-day roll-forward over ops. Returns aligned (actual, forecast)
// series; unscorable days stay absent on the forecast side.
std::pair<ScalarSeries, ScalarSeries> roll_forward_days(
    const ProfileForecaster& fc, const OperationSeries& ops) {
  validate_series(ops);
  const auto lag_window = static_cast<std::size_t>(fc.lag_window());
  const auto slots_per_day = static_cast<std::size_t>(1440 / ops.step_minutes);

  ScalarSeries actual, forecast;
  actual.start = forecast.start = ops.start;
  actual.step_minutes = forecast.step_minutes = ops.step_minutes;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops.records[i])
      actual.push(target_of(*ops.records[i], fc.target));
    else
      actual.push_absent();
    forecast.push_absent();
  }

  MlpWorkspace ws;
  std::vector<double> row, lag_values(fc.lags.size());
  std::vector<double> day_pred(slots_per_day);
  for (std::size_t s = first_midnight_slot(ops); s + slots_per_day <= ops.size();
       s += slots_per_day) {
    if (s < lag_window) continue;
    bool ok = true;
    for (std::size_t i = s; ok && i < s + slots_per_day; ++i) {
      if (!ops.records[i]) ok = false;  // need weather for every slot
      for (std::size_t k = 0; ok && k < fc.lags.size(); ++k) {
        const std::size_t src = i - static_cast<std::size_t>(fc.lags[k]);
        if (src < s && !actual.records[src]) ok = false;
      }
    }
    if (!ok) continue;
    for (std::size_t i = s; i < s + slots_per_day; ++i) {
      for (std::size_t k = 0; k < fc.lags.size(); ++k) {
        const std::size_t src = i - static_cast<std::size_t>(fc.lags[k]);
        lag_values[k] = src < s ? *actual.records[src] : day_pred[src - s];
      }
      day_pred[i - s] = predict_one(fc, ops.records[i]->weather, ops.time_at(i),
                                    lag_values, ws, row);
    }
    for (std::size_t i = s; i < s + slots_per_day; ++i)
      forecast.records[i] = day_pred[i - s];
  }
  return {std::move(actual), std::move(forecast)};
}

OperationSeries slice_ops(const OperationSeries& ops, std::size_t from) {
  OperationSeries out;
  out.start = ops.time_at(from);
  out.step_minutes = ops.step_minutes;
  out.records.assign(ops.records.begin() + static_cast<std::ptrdiff_t>(from),
                     ops.records.end());
  return out;
}

}  // namespace

LinearModel fit_linear(const ScalarSeries& temps, const ScalarSeries& targets,
                       Granularity granularity) {
  validate_series(temps);
  validate_series(targets);
  if (!aligned(temps, targets))
    throw std::invalid_argument("misaligned series");
  const auto at = resample_mean(temps, granularity);
  const auto bt = resample_mean(targets, granularity);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < at.size(); ++i) {
    if (!at.points[i].value || !bt.points[i].value) continue;
    xs.push_back(*at.points[i].value);
    ys.push_back(*bt.points[i].value);
  }
  if (xs.size() < 3) throw std::runtime_error("insufficient data");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, stot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    stot += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::runtime_error("degenerate series");

  LinearModel m;
  m.granularity = granularity;
  m.slope = sxy / sxx;
  m.intercept = my - m.slope * mx;
  double sres = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (m.slope * xs[i] + m.intercept);
    sres += r * r;
  }
  m.fit_r2 = stot == 0.0 ? 1.0 : 1.0 - sres / stot;
  return m;
}

double predict_linear(const LinearModel& m, double temp_aggregate) {
  return std::max(m.slope * temp_aggregate + m.intercept, 0.0);
}

ProfileForecaster fit_profile(const OperationSeries& history,
                              TargetKind target, const MlpHyperparams& hp) {
  validate_series(history);
  const double days = static_cast<double>(history.size()) *
                      history.step_minutes / 1440.0;
  if (days < 60.0) throw std::invalid_argument("insufficient data");

  ProfileForecaster fc;
  fc.target = target;
  fc.lags = kDefaultLags;
  const auto lag_window = static_cast<std::size_t>(fc.lag_window());
  const std::size_t split_end = history.size() * 7 / 10;

  Dataset X, Y;
  std::vector<double> row(kBaseFeatures + fc.lags.size());
  std::vector<double> lag_values(fc.lags.size());
  for (std::size_t i = lag_window; i < split_end; ++i) {
    if (!history.records[i]) continue;
    bool ok = true;
    for (std::size_t k = 0; k < fc.lags.size(); ++k) {
      const std::size_t src = i - static_cast<std::size_t>(fc.lags[k]);
      if (!history.records[src]) {
        ok = false;
        break;
      }
      lag_values[k] = target_of(*history.records[src], target);
    }
    if (!ok) continue;
    fill_features(history.records[i]->weather, history.time_at(i), lag_values,
                  row);
    X.push_row(row);
    const double t = target_of(*history.records[i], target);
    Y.push_row({&t, 1});
  }
  if (X.rows() < lag_window) throw std::invalid_argument("insufficient data");

  fc.input_scaler = Scaler::fit(X);
  for (std::size_t i = 0; i < X.rows(); ++i)
    fc.input_scaler.normalize({X.data.data() + i * X.dim, X.dim});
  const auto t_scaler = Scaler::fit(Y);
  fc.target_mean = t_scaler.mean[0];
  fc.target_scale = t_scaler.scale[0];
  for (auto& v : Y.data) v = (v - fc.target_mean) / fc.target_scale;

  fc.net = Mlp(X.dim, hp.hidden, 1);
  mlp_train(fc.net, X, Y, hp);

  fc.train_begin = history.time_at(0);
  fc.train_end = history.time_at(split_end - 1);

  const auto holdout = slice_ops(history, split_end);
  auto [actual, forecast] = roll_forward_days(fc, holdout);
  fc.holdout_mape = mape(actual, forecast);
  return fc;
}

CoolingProfile forecast_profile(const ProfileForecaster& fc,
                                const WeatherSeries& weather_forecast,
                                const OperationSeries& recent_history) {
  CoolingProfile profile;
  profile.start = weather_forecast.start;
  profile.step_minutes = weather_forecast.step_minutes;
  if (weather_forecast.records.empty()) return profile;  // zero horizon

  validate_series(recent_history);
  if (recent_history.step_minutes != weather_forecast.step_minutes ||
      recent_history.time_at(recent_history.size()) != weather_forecast.start)
    throw std::invalid_argument("misaligned series");

  const auto lag_window = static_cast<std::size_t>(fc.lag_window());
  if (recent_history.size() < lag_window)
    throw std::runtime_error("missing lag window");

  // Rolling target buffer: actual history first, then own predictions.
  std::vector<double> buffer(lag_window);
  for (std::size_t k = 0; k < lag_window; ++k) {
    const std::size_t src = recent_history.size() - lag_window + k;
    if (!recent_history.records[src])
      throw std::runtime_error("missing lag window");
    buffer[k] = target_of(*recent_history.records[src], fc.target);
  }

  MlpWorkspace ws;
  std::vector<double> row, lag_values(fc.lags.size());
  for (std::size_t i = 0; i < weather_forecast.size(); ++i) {
    if (!weather_forecast.records[i])
      throw std::invalid_argument("weather forecast has gaps");
    for (std::size_t k = 0; k < fc.lags.size(); ++k)
      lag_values[k] = buffer[buffer.size() -
                             static_cast<std::size_t>(fc.lags[k])];
    const double y =
        predict_one(fc, *weather_forecast.records[i],
                    weather_forecast.time_at(i), lag_values, ws, row);
    profile.push(y);
    buffer.erase(buffer.begin());
    buffer.push_back(y);
  }
  return profile;
}

MapeResult evaluate_forecaster(const ProfileForecaster& fc,
                               const OperationSeries& holdout) {
  validate_series(holdout);
  const Timestamp h_end = holdout.time_at(holdout.size() - 1);
  if (!(h_end < fc.train_begin || fc.train_end < holdout.start))
    throw std::runtime_error("data leakage");
  auto [actual, forecast] = roll_forward_days(fc, holdout);
  return mape(actual, forecast);
}

void save_forecaster(const std::string& path, const ProfileForecaster& fc) {
  using detail::json;
  json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = "profile_forecaster";
  j["target"] = fc.target == TargetKind::cooling ? "cooling" : "power";
  j["lags"] = fc.lags;
  j["net"] = detail::mlp_to_json(fc.net);
  j["input_scaler"] = detail::scaler_to_json(fc.input_scaler);
  j["target_mean"] = fc.target_mean;
  j["target_scale"] = fc.target_scale;
  j["holdout_mape"] = detail::mape_to_json(fc.holdout_mape);
  j["train_begin"] = fc.train_begin.to_string();
  j["train_end"] = fc.train_end.to_string();
  detail::write_model_document(path, j);
}

ProfileForecaster load_forecaster(const std::string& path) {
  const auto j = detail::load_model_document(path, "profile_forecaster");
  ProfileForecaster fc;
  try {
    const auto target = j.at("target").get<std::string>();
    if (target == "cooling")
      fc.target = TargetKind::cooling;
    else if (target == "power")
      fc.target = TargetKind::power;
    else
      throw std::runtime_error("unknown target '" + target + "'");
    fc.lags = j.at("lags").get<std::vector<int>>();
    fc.net = detail::mlp_from_json(j.at("net"));
    fc.input_scaler = detail::scaler_from_json(j.at("input_scaler"));
    fc.target_mean = j.at("target_mean").get<double>();
    fc.target_scale = j.at("target_scale").get<double>();
    fc.holdout_mape = detail::mape_from_json(j.at("holdout_mape"));
    fc.train_begin = Timestamp::parse(j.at("train_begin").get<std::string>());
    fc.train_end = Timestamp::parse(j.at("train_end").get<std::string>());
  } catch (const detail::json::exception& e) {
    throw std::runtime_error("bad forecaster document " + path + ": " +
                             e.what());
  }
  if (fc.net.n_in != kBaseFeatures + fc.lags.size() || fc.net.n_out != 1)
    throw std::runtime_error("forecaster dimensions inconsistent in " + path);
  return fc;
}

}  // namespace chillopt
