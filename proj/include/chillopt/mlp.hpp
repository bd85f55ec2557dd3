// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chillopt/rng.hpp"

namespace chillopt {

// Row-major sample matrix; all learners feed on this.
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> data;  // n_rows * dim

  std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
  void push_row(std::span<const double> r);
};

// Per-column standardization. Constant columns get scale 1 so they pass
// through unchanged; they are flagged, not dropped.
struct Scaler {
  std::vector<double> mean, scale;
  std::vector<std::uint8_t> constant;

  static Scaler fit(const Dataset& d);
  void normalize(std::span<double> row) const;
  void denormalize(std::span<double> row) const;
};

// One hidden tanh layer, linear outputs, parameters in one flat vector:
// [W1 (hidden x in), b1, W2 (out x hidden), b2]. Flat storage keeps the
// optimizer state and serialization trivial.
struct Mlp {
  std::size_t n_in = 0, n_hidden = 0, n_out = 0;
  std::vector<double> params;

  Mlp() = default;
  Mlp(std::size_t in, std::size_t hidden, std::size_t out);

  std::size_t w1_off() const { return 0; }
  std::size_t b1_off() const { return n_hidden * n_in; }
  std::size_t w2_off() const { return b1_off() + n_hidden; }
  std::size_t b2_off() const { return w2_off() + n_out * n_hidden; }
  std::size_t n_params() const { return b2_off() + n_out; }

  void init_weights(Rng& rng);
};

// Scratch buffers so forward/backward never allocate in hot loops. One per
// thread when evaluating concurrently.
struct MlpWorkspace {
  std::vector<double> pre, hidden, out, dy, dh;
};

void mlp_forward(const Mlp& net, std::span<const double> x,
                 std::span<double> y, MlpWorkspace& ws);

// Mean squared error over the batch and outputs; accumulates parameter
// gradients into grad (same length as params, caller zeroes it).
double mlp_loss_grad(const Mlp& net, const Dataset& X, const Dataset& Y,
                     std::span<const std::size_t> batch,
                     std::span<double> grad, MlpWorkspace& ws);

struct MlpHyperparams {
  std::size_t hidden = 32;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  int max_epochs = 500;
  // Converged when relative loss improvement over this many epochs drops
  // under the tolerance.
  double convergence_rel_tol = 1e-4;
  int convergence_window = 10;
  std::uint64_t seed = 1;
};

struct TrainInfo {
  int epochs = 0;
  double final_loss = 0.0;
  bool converged = false;
};

// Seeded minibatch training with adaptive moment estimates on the flat
// parameter vector. X and Y must be pre-normalized. Throws "diverged" when
// the loss leaves the finite range.
TrainInfo mlp_train(Mlp& net, const Dataset& X, const Dataset& Y,
                    const MlpHyperparams& hp);

}  // namespace chillopt
