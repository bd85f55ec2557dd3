// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace chillopt {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

double parse_double(const std::string& field, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0')
    throw std::runtime_error("bad numeric field '" + field + "' in " + path);
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

// Shared row-oriented reader. value_count fields follow the timestamp; a row
// is absent when all of them are empty.
template <typename R, typename MakeFn>
TimeSeries<R> read_series(const std::string& path,
                          const std::string& expect_header, int value_count,
                          MakeFn make) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expect_header)
    throw std::runtime_error("bad header in " + path + ": " + line);

  TimeSeries<R> series;
  bool first = true;
  Timestamp prev;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (static_cast<int>(fields.size()) != value_count + 1)
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

    int empties = 0;
    for (int i = 1; i <= value_count; ++i)
      if (fields[static_cast<std::size_t>(i)].empty()) ++empties;
    if (empties == value_count) {
      series.push_absent();
    } else if (empties == 0) {
      series.push(make(fields, path));
    } else {
      throw std::runtime_error("partially empty row in " + path + ": " + line);
    }
  }
  validate_series(series);
  return series;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

void write_weather_csv(const std::string& path, const WeatherSeries& series) {
  validate_series(series);
  auto out = open_out(path);
  out << "timestamp,dry_bulb_c,rel_humidity_pct\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.time_at(i).to_string() << ',';
    if (const auto& r = series.records[i]) {
      out << format_double(r->dry_bulb_c) << ','
          << format_double(r->rel_humidity_pct);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

WeatherSeries read_weather_csv(const std::string& path) {
  return read_series<WeatherRecord>(
      path, "timestamp,dry_bulb_c,rel_humidity_pct", 2,
      [](const std::vector<std::string>& f, const std::string& p) {
        return make_weather(parse_double(f[1], p), parse_double(f[2], p));
      });
}

void write_energy_csv(const std::string& path, const EnergySeries& series) {
  validate_series(series);
  auto out = open_out(path);
  out << "timestamp,power_kw,cooling_kw\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.time_at(i).to_string() << ',';
    if (const auto& r = series.records[i]) {
      out << format_double(r->power_kw) << ',' << format_double(r->cooling_kw);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

EnergySeries read_energy_csv(const std::string& path) {
  return read_series<EnergyRecord>(
      path, "timestamp,power_kw,cooling_kw", 2,
      [](const std::vector<std::string>& f, const std::string& p) {
        return EnergyRecord{parse_double(f[1], p), parse_double(f[2], p)};
      });
}

}  // namespace chillopt
