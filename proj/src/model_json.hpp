// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

// Shared pieces of the versioned model persistence format. Internal.

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "chillopt/metrics.hpp"
#include "chillopt/mlp.hpp"
#include "chillopt/version.hpp"

namespace chillopt::detail {

using nlohmann::json;

inline json mlp_to_json(const Mlp& net) {
  return {{"n_in", net.n_in},
          {"n_hidden", net.n_hidden},
          {"n_out", net.n_out},
          {"params", net.params}};
}

inline Mlp mlp_from_json(const json& j) {
  Mlp net(j.at("n_in").get<std::size_t>(),
          j.at("n_hidden").get<std::size_t>(),
          j.at("n_out").get<std::size_t>());
  net.params = j.at("params").get<std::vector<double>>();
  if (net.params.size() != net.n_params())
    throw std::runtime_error("model parameter count mismatch");
  return net;
}

inline json scaler_to_json(const Scaler& s) {
  return {{"mean", s.mean}, {"scale", s.scale}, {"constant", s.constant}};
}

inline Scaler scaler_from_json(const json& j) {
  Scaler s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  s.constant = j.at("constant").get<std::vector<std::uint8_t>>();
  if (s.mean.size() != s.scale.size() || s.mean.size() != s.constant.size())
    throw std::runtime_error("scaler size mismatch");
  return s;
}

inline json mape_to_json(const MapeResult& r) {
  return {{"mape_pct", r.mape_pct},
          {"ci_halfwidth_pct", r.ci_halfwidth_pct},
          {"ci_level", r.ci_level},
          {"n_days", r.n_days},
          {"n_excluded", r.n_excluded}};
}

inline MapeResult mape_from_json(const json& j) {
  MapeResult r;
  r.mape_pct = j.at("mape_pct").get<double>();
  r.ci_halfwidth_pct = j.at("ci_halfwidth_pct").get<double>();
  r.ci_level = j.at("ci_level").get<double>();
  r.n_days = j.at("n_days").get<std::size_t>();
  r.n_excluded = j.at("n_excluded").get<std::size_t>();
  return r;
}

// Reads the document, enforcing format version and model kind before the
// caller touches any other field.
inline json load_model_document(const std::string& path,
                                const std::string& want_kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("bad json in " + path + ": " + e.what());
  }
  const auto version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion)
    throw std::runtime_error("unsupported model format version " +
                             std::to_string(version) + " in " + path);
  const auto kind = j.at("kind").get<std::string>();
  if (kind != want_kind)
    throw std::runtime_error("wrong model kind '" + kind + "' in " + path +
                             " (want '" + want_kind + "')");
  return j;
}

inline void write_model_document(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace chillopt::detail
