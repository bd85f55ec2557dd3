// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chillopt/timeseries.hpp"
#include "model_json.hpp"

namespace chillopt {

namespace {

void fill_row(const SetpointVector& sp, const WeatherRecord& w,
              std::vector<double>& row) {
  row = sp.canonicalized().flatten();
  row.push_back(w.dry_bulb_c);
  row.push_back(w.wet_bulb_c);
}

}  // namespace

SurrogateModel train_surrogate(const OperationSeries& history,
                               const MlpHyperparams& hp) {
  validate_series(history);
  const double days = static_cast<double>(history.size()) *
                      history.step_minutes / 1440.0;
  if (days < 60.0) throw std::invalid_argument("insufficient data");

  Dataset X, Y;
  std::vector<double> row;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (!history.records[i]) continue;
    const auto& rec = *history.records[i];
    fill_row(rec.setpoints, rec.weather, row);
    X.push_row(row);
    const double y[2] = {rec.output.power_kw, rec.output.cooling_kw};
    Y.push_row(y);
  }
  if (X.rows() == 0) throw std::invalid_argument("insufficient data");

  SurrogateModel m;
  m.domain_min.assign(X.dim, 0.0);
  m.domain_max.assign(X.dim, 0.0);
  for (std::size_t j = 0; j < X.dim; ++j) {
    double lo = X.data[j], hi = X.data[j];
    for (std::size_t i = 1; i < X.rows(); ++i) {
      lo = std::min(lo, X.data[i * X.dim + j]);
      hi = std::max(hi, X.data[i * X.dim + j]);
    }
    m.domain_min[j] = lo;
    m.domain_max[j] = hi;
  }

  m.input_scaler = Scaler::fit(X);
  for (std::size_t j = 0; j < X.dim; ++j) {
    if (m.input_scaler.constant[j])
      m.warnings.push_back("constant input column " + std::to_string(j));
  }
  for (std::size_t i = 0; i < X.rows(); ++i)
    m.input_scaler.normalize({X.data.data() + i * X.dim, X.dim});
  m.output_scaler = Scaler::fit(Y);
  for (std::size_t i = 0; i < Y.rows(); ++i)
    m.output_scaler.normalize({Y.data.data() + i * Y.dim, Y.dim});

  m.net = Mlp(X.dim, hp.hidden, 2);
  mlp_train(m.net, X, Y, hp);
  return m;
}

PlantOutput predict(const SurrogateModel& model, const SetpointVector& sp,
                    const WeatherRecord& weather) {
  thread_local std::vector<double> row;
  thread_local MlpWorkspace ws;
  fill_row(sp, weather, row);
  if (row.size() != model.net.n_in)
    throw std::invalid_argument("input dimension mismatch");
  model.input_scaler.normalize(row);
  double y[2];
  mlp_forward(model.net, row, y, ws);
  model.output_scaler.denormalize(y);
  PlantOutput out;
  out.power_kw = std::max(y[0], 0.0);
  out.cooling_kw = std::max(y[1], 0.0);
  return out;
}

bool is_ood(const SurrogateModel& model, const SetpointVector& sp,
            const WeatherRecord& weather) {
  std::vector<double> row;
  fill_row(sp, weather, row);
  if (row.size() != model.net.n_in)
    throw std::invalid_argument("input dimension mismatch");
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] < model.domain_min[j] || row[j] > model.domain_max[j])
      return true;
  }
  return false;
}

SurrogateMetrics evaluate_surrogate(const SurrogateModel& model,
                                    const OperationSeries& test) {
  validate_series(test);
  ScalarSeries power_actual, power_pred, cooling_actual, cooling_pred;
  for (auto* s : {&power_actual, &power_pred, &cooling_actual, &cooling_pred}) {
    s->start = test.start;
    s->step_minutes = test.step_minutes;
  }
  std::size_t evaluated = 0, ood = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!test.records[i]) {
      for (auto* s : {&power_actual, &power_pred, &cooling_actual,
                      &cooling_pred})
        s->push_absent();
      continue;
    }
    const auto& rec = *test.records[i];
    const auto pred = predict(model, rec.setpoints, rec.weather);
    power_actual.push(rec.output.power_kw);
    power_pred.push(pred.power_kw);
    cooling_actual.push(rec.output.cooling_kw);
    cooling_pred.push(pred.cooling_kw);
    ++evaluated;
    if (is_ood(model, rec.setpoints, rec.weather)) ++ood;
  }
  SurrogateMetrics metrics;
  metrics.power_mape = mape(power_actual, power_pred);
  metrics.cooling_mape = mape(cooling_actual, cooling_pred);
  metrics.ood_fraction =
      evaluated == 0 ? 0.0 : static_cast<double>(ood) / evaluated;
  return metrics;
}

void save_surrogate(const std::string& path, const SurrogateModel& model) {
  using detail::json;
  json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = "surrogate";
  j["net"] = detail::mlp_to_json(model.net);
  j["input_scaler"] = detail::scaler_to_json(model.input_scaler);
  j["output_scaler"] = detail::scaler_to_json(model.output_scaler);
  j["domain_min"] = model.domain_min;
  j["domain_max"] = model.domain_max;
  j["warnings"] = model.warnings;
  detail::write_model_document(path, j);
}

SurrogateModel load_surrogate(const std::string& path) {
  const auto j = detail::load_model_document(path, "surrogate");
  SurrogateModel m;
  try {
    m.net = detail::mlp_from_json(j.at("net"));
    m.input_scaler = detail::scaler_from_json(j.at("input_scaler"));
    m.output_scaler = detail::scaler_from_json(j.at("output_scaler"));
    m.domain_min = j.at("domain_min").get<std::vector<double>>();
    m.domain_max = j.at("domain_max").get<std::vector<double>>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const detail::json::exception& e) {
    throw std::runtime_error("bad surrogate document " + path + ": " +
                             e.what());
  }
  if (m.net.n_out != 2 || m.domain_min.size() != m.net.n_in ||
      m.domain_max.size() != m.net.n_in)
    throw std::runtime_error("surrogate dimensions inconsistent in " + path);
  return m;
}

}  // namespace chillopt
