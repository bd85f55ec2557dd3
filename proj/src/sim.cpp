// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "chillopt/csv.hpp"
#include "chillopt/rng.hpp"

namespace chillopt {

namespace {

constexpr int kSlotsPerDay = 96;
constexpr double kTau = 2.0 * std::numbers::pi;

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Fraction of the year elapsed, anchored to the calendar so January stays
// the cold season whatever the series start date.
double year_fraction(const Timestamp& t) {
  const auto jan1 = days_from_civil(t.year(), 1, 1);
  return static_cast<double>(t.day_index() - jan1) / 365.25;
}

double hour_of_day(const Timestamp& t) {
  return t.hour() + t.minute() / 60.0;
}

}  // namespace

WeatherSeries synth_weather(std::uint64_t seed, int n_days,
                            const WeatherProfile& p) {
  if (n_days < 1) throw std::invalid_argument("n_days must be >= 1");
  Rng rng(seed);
  WeatherSeries series;
  series.start = p.start;
  series.step_minutes = 15;
  series.records.reserve(static_cast<std::size_t>(n_days) * kSlotsPerDay);
  for (int i = 0; i < n_days * kSlotsPerDay; ++i) {
    const Timestamp t = series.start.plus_minutes(15ll * i);
    const double seasonal =
        -p.seasonal_amp_c * std::cos(kTau * year_fraction(t));
    // Afternoon peak at 14:00; humidity swings the opposite way.
    const double diurnal_phase = std::cos(kTau * (hour_of_day(t) - 14.0) / 24.0);
    const double dry =
        clamp(p.annual_mean_c + seasonal + p.diurnal_amp_c * diurnal_phase +
                  p.noise_sd_c * rng.normal(),
              5.0, 38.0);
    const double rh =
        clamp(p.rh_mean_pct - p.rh_diurnal_swing_pct * diurnal_phase +
                  p.rh_noise_sd_pct * rng.normal(),
              30.0, 100.0);
    series.push(make_weather(dry, rh));
  }
  return series;
}

double DemandModel::mean_demand_kw(const Timestamp& t,
                                   const WeatherRecord& w) const {
  double d = base_kw;
  d += temp_coeff_kw_per_c * std::max(0.0, w.dry_bulb_c - ref_temp_c);
  d += humidity_coeff_kw_per_pct * (w.rel_humidity_pct - humidity_ref_pct);

  const double h = hour_of_day(t);
  double occupied = 0.0;
  if (h >= 9.0 && h < 17.0) {
    occupied = 1.0;
  } else if (h >= 7.0 && h < 9.0) {
    occupied = 0.5 * (1.0 - std::cos(std::numbers::pi * (h - 7.0) / 2.0));
  } else if (h >= 17.0 && h < 19.0) {
    occupied = 0.5 * (1.0 + std::cos(std::numbers::pi * (h - 17.0) / 2.0));
  }
  const bool weekend = t.weekday() >= 5;
  d += occupied * (weekend ? occupancy_weekend_kw : occupancy_weekday_kw);
  return std::max(d, 0.0);
}

OperationSeries generate_history(const PlantConfig& cfg, std::uint64_t seed,
                                 int n_days, const DemandModel& demand,
                                 const WeatherProfile& profile) {
  cfg.validate();
  if (n_days < 1) throw std::invalid_argument("n_days must be >= 1");
  const auto weather = synth_weather(mix_seed(seed, 0), n_days, profile);
  Rng noise(mix_seed(seed, 1));

  OperationSeries series;
  series.start = weather.start;
  series.step_minutes = weather.step_minutes;
  series.records.reserve(weather.size());
  for (std::size_t i = 0; i < weather.size(); ++i) {
    const auto& w = *weather.records[i];
    const Timestamp t = weather.time_at(i);
    const double d = std::max(
        0.0, demand.mean_demand_kw(t, w) + demand.noise_sd_kw * noise.normal());
    const auto sp = legacy_policy(cfg, d);
    series.push({w, sp, plant_step(cfg, w, sp, d), d});
  }
  return series;
}

void write_scalar_csv(const std::string& path, const std::string& value_name,
                      const ScalarSeries& series) {
  validate_series(series);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "timestamp," << value_name << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.time_at(i).to_string() << ',';
    if (series.records[i]) out << format_double(*series.records[i]);
    out << '\n';
  }
}

ScalarSeries read_scalar_csv(const std::string& path,
                             const std::string& value_name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp," + value_name)
    throw std::runtime_error("bad header in " + path + ": " + line);
  ScalarSeries series;
  bool first = true;
  Timestamp prev;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("bad row in " + path + ": " + line);
    const Timestamp t = Timestamp::parse(line.substr(0, comma));
    if (first) {
      series.start = t;
      first = false;
    } else {
      const auto gap = t.minutes_since_epoch() - prev.minutes_since_epoch();
      if (gap <= 0)
        throw std::runtime_error("timestamps not increasing in " + path);
      if (series.records.size() == 1)
        series.step_minutes = static_cast<int>(gap);
      else if (gap != series.step_minutes)
        throw std::runtime_error("non-uniform step in " + path);
    }
    prev = t;
    const std::string field = line.substr(comma + 1);
    if (field.empty()) {
      series.push_absent();
    } else {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0')
        throw std::runtime_error("bad numeric field '" + field + "' in " +
                                 path);
      series.push(v);
    }
  }
  validate_series(series);
  return series;
}

void write_setpoints_csv(const std::string& path, const PlantConfig& cfg,
                         const TimeSeries<SetpointVector>& series) {
  validate_series(series);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "timestamp";
  for (const auto& name : setpoint_slot_names(cfg)) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.time_at(i).to_string();
    if (series.records[i]) {
      for (double v : series.records[i]->canonicalized().flatten())
        out << ',' << format_double(v);
    } else {
      for (std::size_t k = 0; k < 2 * (cfg.n_chillers() + cfg.n_pumps() +
                                       cfg.n_towers());
           ++k)
        out << ',';
    }
    out << '\n';
  }
}

TimeSeries<SetpointVector> read_setpoints_csv(const std::string& path,
                                              const PlantConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string want = "timestamp";
  for (const auto& name : setpoint_slot_names(cfg)) want += ',' + name;
  if (line != want)
    throw std::runtime_error("bad header in " + path + ": " + line);

  const std::size_t n_slots =
      2 * (cfg.n_chillers() + cfg.n_pumps() + cfg.n_towers());
  TimeSeries<SetpointVector> series;
  bool first = true;
  Timestamp prev;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (fields.size() != n_slots + 1)
      throw std::runtime_error("bad row in " + path + ": " + line);
    const Timestamp t = Timestamp::parse(fields[0]);
    if (first) {
      series.start = t;
      first = false;
    } else {
      const auto gap = t.minutes_since_epoch() - prev.minutes_since_epoch();
      if (gap <= 0)
        throw std::runtime_error("timestamps not increasing in " + path);
      if (series.records.size() == 1)
        series.step_minutes = static_cast<int>(gap);
      else if (gap != series.step_minutes)
        throw std::runtime_error("non-uniform step in " + path);
    }
    prev = t;
    std::size_t empties = 0;
    for (std::size_t i = 1; i < fields.size(); ++i)
      if (fields[i].empty()) ++empties;
    if (empties == n_slots) {
      series.push_absent();
      continue;
    }
    if (empties != 0)
      throw std::runtime_error("partially empty row in " + path + ": " + line);
    std::vector<double> slots(n_slots);
    for (std::size_t i = 0; i < n_slots; ++i) {
      char* end = nullptr;
      slots[i] = std::strtod(fields[i + 1].c_str(), &end);
      if (end == fields[i + 1].c_str() || *end != '\0')
        throw std::runtime_error("bad numeric field '" + fields[i + 1] +
                                 "' in " + path);
    }
    series.push(SetpointVector::unflatten(cfg, slots));
  }
  validate_series(series);
  return series;
}

void write_history_csvs(const std::string& dir, const PlantConfig& cfg,
                        const OperationSeries& history) {
  validate_series(history);
  std::filesystem::create_directories(dir);

  WeatherSeries weather;
  EnergySeries energy;
  TimeSeries<SetpointVector> setpoints;
  weather.start = energy.start = setpoints.start = history.start;
  weather.step_minutes = energy.step_minutes = setpoints.step_minutes =
      history.step_minutes;
  for (const auto& rec : history.records) {
    if (!rec) {
      weather.push_absent();
      energy.push_absent();
      setpoints.push_absent();
      continue;
    }
    weather.push(rec->weather);
    energy.push({rec->output.power_kw, rec->output.cooling_kw});
    setpoints.push(rec->setpoints);
  }
  const std::filesystem::path base(dir);
  write_weather_csv((base / "weather.csv").string(), weather);
  write_energy_csv((base / "energy.csv").string(), energy);
  write_setpoints_csv((base / "setpoints.csv").string(), cfg, setpoints);
}

}  // namespace chillopt
