// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Holistic plant surrogate: one regressor from (setpoints, weather) to
// (power, cooling). Intermediate plant quantities are deliberately not
// modeled; the optimizer only ever sees this map.

#pragma once

#include <string>
#include <vector>

#include "chillopt/metrics.hpp"
#include "chillopt/mlp.hpp"
#include "chillopt/plant.hpp"
#include "chillopt/records.hpp"
#include "chillopt/sim.hpp"

namespace chillopt {

// Input layout: canonicalized flattened setpoint slots, then dry bulb, then
// wet bulb. Off-device speed slots are zeroed before featurization, so any
// two encodings of the same physical state map to the same input row.
struct SurrogateModel {
  Mlp net;              // n_out is always 2: power then cooling
  Scaler input_scaler;
  Scaler output_scaler;

  // Raw per-input bounds seen during training. A row is out of domain when
  // any input falls outside its box.
  std::vector<double> domain_min;
  std::vector<double> domain_max;

  // Data-quality notes from training (constant columns and the like).
  std::vector<std::string> warnings;

  std::size_t n_inputs() const { return net.n_in; }
};

struct SurrogateMetrics {
  MapeResult power_mape;
  MapeResult cooling_mape;
  double ood_fraction = 0.0;  // share of evaluated rows outside the domain
};

// Supervised fit against recorded operation. Requires at least 60 days of
// history. Constant input columns are retained and reported via warnings.
SurrogateModel train_surrogate(const OperationSeries& history,
                               const MlpHyperparams& hp = {});

// Pure prediction; both outputs floored at 0.
PlantOutput predict(const SurrogateModel& model, const SetpointVector& sp,
                    const WeatherRecord& weather);

// True when any input of the row lies outside the training-domain box.
bool is_ood(const SurrogateModel& model, const SetpointVector& sp,
            const WeatherRecord& weather);

SurrogateMetrics evaluate_surrogate(const SurrogateModel& model,
                                    const OperationSeries& test);

void save_surrogate(const std::string& path, const SurrogateModel& model);
SurrogateModel load_surrogate(const std::string& path);

}  // namespace chillopt
