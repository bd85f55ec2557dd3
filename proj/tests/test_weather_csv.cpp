// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "chillopt/csv.hpp"
#include "chillopt/records.hpp"
#include "chillopt/rng.hpp"

using namespace chillopt;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path("/tmp/chillopt_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_SUITE("weather") {

TEST_CASE("stull wet bulb matches independently computed values") {
  CHECK(wet_bulb_stull(25.0, 50.0) ==
        doctest::Approx(17.99814746834343).epsilon(1e-12));
  CHECK(wet_bulb_stull(30.0, 80.0) ==
        doctest::Approx(27.12969171058859).epsilon(1e-12));
  CHECK(wet_bulb_stull(10.0, 95.0) ==
        doctest::Approx(9.42589173559608).epsilon(1e-12));
  CHECK(wet_bulb_stull(35.0, 20.0) ==
        doctest::Approx(19.302351794569628).epsilon(1e-12));
}

TEST_CASE("wet bulb never exceeds dry bulb") {
  for (double t = -5.0; t <= 45.0; t += 1.7)
    for (double rh = 0.0; rh <= 100.0; rh += 7.3)
      CHECK(wet_bulb_stull(t, rh) <= t);
}

TEST_CASE("wet bulb rises with humidity at fixed temperature") {
  double prev = wet_bulb_stull(30.0, 5.0);
  for (double rh = 10.0; rh <= 100.0; rh += 5.0) {
    const double wb = wet_bulb_stull(30.0, rh);
    CHECK(wb >= prev);
    prev = wb;
  }
}

TEST_CASE("make_weather validates humidity and fills wet bulb") {
  const auto w = make_weather(25.0, 50.0);
  CHECK(w.wet_bulb_c == doctest::Approx(17.99814746834343));
  CHECK_THROWS_AS(make_weather(25.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_weather(25.0, 101.0), std::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("csv") {

TEST_CASE("weather series round-trips including absent slots") {
  WeatherSeries s;
  s.start = Timestamp::civil(2021, 5, 1);
  s.step_minutes = 15;
  Rng rng(404);
  for (int i = 0; i < 200; ++i) {
    if (i % 17 == 3)
      s.push_absent();
    else
      s.push(make_weather(15.0 + 20.0 * rng.uniform01(),
                          100.0 * rng.uniform01()));
  }
  TempFile f("weather_roundtrip.csv");
  write_weather_csv(f.path, s);
  const auto back = read_weather_csv(f.path);
  REQUIRE(back.size() == s.size());
  CHECK(back.start == s.start);
  CHECK(back.step_minutes == s.step_minutes);
  for (std::size_t i = 0; i < s.size(); ++i) {
    REQUIRE(back.records[i].has_value() == s.records[i].has_value());
    if (!s.records[i]) continue;
    CHECK(back.records[i]->dry_bulb_c == s.records[i]->dry_bulb_c);
    CHECK(back.records[i]->rel_humidity_pct == s.records[i]->rel_humidity_pct);
    CHECK(back.records[i]->wet_bulb_c == s.records[i]->wet_bulb_c);
  }
}

TEST_CASE("energy series round-trips exactly") {
  EnergySeries s;
  s.start = Timestamp::civil(2021, 5, 1);
  s.step_minutes = 15;
  Rng rng(405);
  for (int i = 0; i < 150; ++i)
    s.push({500.0 + 100.0 * rng.normal(), 2000.0 + 300.0 * rng.normal()});
  TempFile f("energy_roundtrip.csv");
  write_energy_csv(f.path, s);
  const auto back = read_energy_csv(f.path);
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back.records[i]->power_kw == s.records[i]->power_kw);
    CHECK(back.records[i]->cooling_kw == s.records[i]->cooling_kw);
  }
}

TEST_CASE("writing twice yields byte-identical files") {
  EnergySeries s;
  s.start = Timestamp::civil(2021, 5, 1);
  s.step_minutes = 15;
  Rng rng(406);
  for (int i = 0; i < 100; ++i)
    s.push({rng.uniform(0.0, 1e4), rng.uniform(0.0, 4e4)});
  TempFile f1("energy_a.csv"), f2("energy_b.csv");
  write_energy_csv(f1.path, s);
  write_energy_csv(f2.path, s);
  std::ifstream a(f1.path), b(f2.path);
  std::string sa((std::istreambuf_iterator<char>(a)),
                 std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)),
                 std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(!sa.empty());
}

TEST_CASE("malformed files are rejected") {
  TempFile f("bad.csv");

  write_text(f.path, "timestamp,power_kw\n");
  CHECK_THROWS(read_energy_csv(f.path));

  write_text(f.path,
             "timestamp,power_kw,cooling_kw\n"
             "2021-05-01T00:00:00Z,100,200\n"
             "2021-05-01T00:00:00Z,100,200\n");
  CHECK_THROWS_WITH(read_energy_csv(f.path),
                    doctest::Contains("timestamps not increasing"));

  write_text(f.path,
             "timestamp,power_kw,cooling_kw\n"
             "2021-05-01T00:00:00Z,100,200\n"
             "2021-05-01T00:15:00Z,100,200\n"
             "2021-05-01T01:00:00Z,100,200\n");
  CHECK_THROWS_WITH(read_energy_csv(f.path),
                    doctest::Contains("non-uniform step"));

  write_text(f.path,
             "timestamp,power_kw,cooling_kw\n"
             "2021-05-01T00:00:00Z,100,\n");
  CHECK_THROWS_WITH(read_energy_csv(f.path),
                    doctest::Contains("partially empty"));

  write_text(f.path,
             "timestamp,power_kw,cooling_kw\n"
             "2021-05-01T00:00:00Z,abc,200\n");
  CHECK_THROWS_WITH(read_energy_csv(f.path),
                    doctest::Contains("bad numeric field"));

  CHECK_THROWS_WITH(read_energy_csv("/nonexistent/nope.csv"),
                    doctest::Contains("cannot open"));
}

TEST_CASE("format_double round-trips doubles compactly") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(100.0) == "100");
  const double ugly = 0.1 + 0.2;
  CHECK(std::strtod(format_double(ugly).c_str(), nullptr) == ugly);
  const double pi = 3.141592653589793;
  CHECK(std::strtod(format_double(pi).c_str(), nullptr) == pi);
}

}  // TEST_SUITE
