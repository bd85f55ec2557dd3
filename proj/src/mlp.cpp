// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/mlp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "chillopt/kernels.hpp"

namespace chillopt {

void Dataset::push_row(std::span<const double> r) {
  if (dim == 0) dim = r.size();
  if (r.size() != dim) throw std::invalid_argument("row width mismatch");
  data.insert(data.end(), r.begin(), r.end());
}

Scaler Scaler::fit(const Dataset& d) {
  if (d.rows() == 0) throw std::invalid_argument("empty input");
  Scaler s;
  s.mean.assign(d.dim, 0.0);
  s.scale.assign(d.dim, 1.0);
  s.constant.assign(d.dim, 0);
  const double n = static_cast<double>(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const auto row = d.row(i);
    for (std::size_t j = 0; j < d.dim; ++j) s.mean[j] += row[j];
  }
  for (auto& m : s.mean) m /= n;
  std::vector<double> var(d.dim, 0.0);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const auto row = d.row(i);
    for (std::size_t j = 0; j < d.dim; ++j) {
      const double dv = row[j] - s.mean[j];
      var[j] += dv * dv;
    }
  }
  for (std::size_t j = 0; j < d.dim; ++j) {
    const double sd = std::sqrt(var[j] / n);
    if (sd > 0.0) {
      s.scale[j] = sd;
    } else {
      s.constant[j] = 1;  // scale stays 1, column passes through centered
    }
  }
  return s;
}

void Scaler::normalize(std::span<double> row) const {
  for (std::size_t j = 0; j < row.size(); ++j)
    row[j] = (row[j] - mean[j]) / scale[j];
}

void Scaler::denormalize(std::span<double> row) const {
  for (std::size_t j = 0; j < row.size(); ++j)
    row[j] = row[j] * scale[j] + mean[j];
}

Mlp::Mlp(std::size_t in, std::size_t hidden, std::size_t out)
    : n_in(in), n_hidden(hidden), n_out(out) {
  if (in == 0 || hidden == 0 || out == 0)
    throw std::invalid_argument("zero layer width");
  params.assign(n_params(), 0.0);
}

void Mlp::init_weights(Rng& rng) {
  const double s1 = 1.0 / std::sqrt(static_cast<double>(n_in));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(n_hidden));
  for (std::size_t i = 0; i < b1_off(); ++i)
    params[i] = rng.uniform(-s1, s1);
  for (std::size_t i = b1_off(); i < w2_off(); ++i) params[i] = 0.0;
  for (std::size_t i = w2_off(); i < b2_off(); ++i)
    params[i] = rng.uniform(-s2, s2);
  for (std::size_t i = b2_off(); i < n_params(); ++i) params[i] = 0.0;
}

namespace {

void ensure_ws(const Mlp& net, MlpWorkspace& ws) {
  ws.pre.resize(net.n_hidden);
  ws.hidden.resize(net.n_hidden);
  ws.out.resize(net.n_out);
  ws.dy.resize(net.n_out);
  ws.dh.resize(net.n_hidden);
}

}  // namespace

void mlp_forward(const Mlp& net, std::span<const double> x,
                 std::span<double> y, MlpWorkspace& ws) {
  if (x.size() != net.n_in || y.size() != net.n_out)
    throw std::invalid_argument("dimension mismatch");
  ensure_ws(net, ws);
  const double* w1 = net.params.data() + net.w1_off();
  const double* b1 = net.params.data() + net.b1_off();
  const double* w2 = net.params.data() + net.w2_off();
  const double* b2 = net.params.data() + net.b2_off();
  for (std::size_t j = 0; j < net.n_hidden; ++j)
    ws.pre[j] = kern::dot(w1 + j * net.n_in, x.data(), net.n_in) + b1[j];
  kern::tanh_eval(ws.pre.data(), ws.hidden.data(), net.n_hidden);
  for (std::size_t k = 0; k < net.n_out; ++k)
    y[k] = kern::dot(w2 + k * net.n_hidden, ws.hidden.data(), net.n_hidden) +
           b2[k];
}

double mlp_loss_grad(const Mlp& net, const Dataset& X, const Dataset& Y,
                     std::span<const std::size_t> batch,
                     std::span<double> grad, MlpWorkspace& ws) {
  if (grad.size() != net.n_params())
    throw std::invalid_argument("gradient size mismatch");
  ensure_ws(net, ws);
  const double* w2 = net.params.data() + net.w2_off();
  double* g_w1 = grad.data() + net.w1_off();
  double* g_b1 = grad.data() + net.b1_off();
  double* g_w2 = grad.data() + net.w2_off();
  double* g_b2 = grad.data() + net.b2_off();

  const double denom =
      static_cast<double>(batch.size()) * static_cast<double>(net.n_out);
  double loss = 0.0;
  for (const std::size_t idx : batch) {
    const auto x = X.row(idx);
    const auto t = Y.row(idx);
    mlp_forward(net, x, ws.out, ws);

    for (std::size_t k = 0; k < net.n_out; ++k) {
      const double e = ws.out[k] - t[k];
      loss += e * e;
      ws.dy[k] = 2.0 * e / denom;
    }
    std::fill(ws.dh.begin(), ws.dh.end(), 0.0);
    for (std::size_t k = 0; k < net.n_out; ++k) {
      kern::axpy(ws.dy[k], ws.hidden.data(), g_w2 + k * net.n_hidden,
                 net.n_hidden);
      g_b2[k] += ws.dy[k];
      kern::axpy(ws.dy[k], w2 + k * net.n_hidden, ws.dh.data(), net.n_hidden);
    }
    for (std::size_t j = 0; j < net.n_hidden; ++j) {
      const double dz = ws.dh[j] * (1.0 - ws.hidden[j] * ws.hidden[j]);
      kern::axpy(dz, x.data(), g_w1 + j * net.n_in, net.n_in);
      g_b1[j] += dz;
    }
  }
  return loss / denom;
}

TrainInfo mlp_train(Mlp& net, const Dataset& X, const Dataset& Y,
                    const MlpHyperparams& hp) {
  if (X.rows() == 0 || X.rows() != Y.rows())
    throw std::invalid_argument("dataset size mismatch");
  if (X.dim != net.n_in || Y.dim != net.n_out)
    throw std::invalid_argument("dimension mismatch");

  Rng rng(hp.seed);
  net.init_weights(rng);

  // Adaptive moment estimates over the flat parameter vector.
  std::vector<double> grad(net.n_params(), 0.0);
  std::vector<double> m(net.n_params(), 0.0), v(net.n_params(), 0.0);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;

  std::vector<std::size_t> order(X.rows());
  std::iota(order.begin(), order.end(), 0);
  MlpWorkspace ws;
  // Minibatch losses wiggle epoch to epoch, so convergence is judged on the
  // running best: stop once a full window passes without a relative
  // improvement of at least the tolerance.
  double best_loss = std::numeric_limits<double>::infinity();
  int epochs_since_improvement = 0;
  TrainInfo info;

  for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t pos = 0; pos < order.size(); pos += hp.batch_size) {
      const std::size_t len = std::min(hp.batch_size, order.size() - pos);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double batch_loss = mlp_loss_grad(
          net, X, Y, {order.data() + pos, len}, grad, ws);
      loss_sum += batch_loss * static_cast<double>(len);
      seen += len;

      beta1_t *= kBeta1;
      beta2_t *= kBeta2;
      for (std::size_t i = 0; i < net.n_params(); ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        const double mhat = m[i] / (1.0 - beta1_t);
        const double vhat = v[i] / (1.0 - beta2_t);
        net.params[i] -= hp.learning_rate * mhat / (std::sqrt(vhat) + kEps);
      }
    }
    const double epoch_loss = loss_sum / static_cast<double>(seen);
    if (!std::isfinite(epoch_loss)) throw std::runtime_error("diverged");
    info.epochs = epoch + 1;
    info.final_loss = epoch_loss;

    if (epoch == 0 ||
        epoch_loss <
            best_loss - hp.convergence_rel_tol * std::max(best_loss, 1e-12)) {
      best_loss = epoch_loss;
      epochs_since_improvement = 0;
    } else {
      best_loss = std::min(best_loss, epoch_loss);
      if (++epochs_since_improvement >= hp.convergence_window) {
        info.converged = true;
        break;
      }
    }
  }
  return info;
}

}  // namespace chillopt
