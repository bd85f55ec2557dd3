// Copyright 2026 The chillopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chillopt/kernels.hpp"

#include <stdexcept>

#include "kernels_detail.hpp"

namespace chillopt::kern {
namespace {

namespace d = detail;

// Scalar reference. The accumulator layout mirrors the AVX2 variant: two
// banks of four lanes, elements assigned round-robin in blocks of eight,
// lanes combined pairwise at the end. That fixes the reduction tree so both
// backends produce identical bits.
double sum_scalar(const double* x, std::size_t n) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (int l = 0; l < 8; ++l) acc[l] += x[i + l];
  const double c0 = acc[0] + acc[4];
  const double c1 = acc[1] + acc[5];
  const double c2 = acc[2] + acc[6];
  const double c3 = acc[3] + acc[7];
  return ((c0 + c2) + (c1 + c3)) + d::sum_tail(x, i, n);
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (int l = 0; l < 8; ++l) acc[l] = std::fma(x[i + l], y[i + l], acc[l]);
  const double c0 = acc[0] + acc[4];
  const double c1 = acc[1] + acc[5];
  const double c2 = acc[2] + acc[6];
  const double c3 = acc[3] + acc[7];
  return ((c0 + c2) + (c1 + c3)) + d::dot_tail(x, y, i, n);
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void tanh_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = d::tanh_one(x[i]);
}

bool cpu_has_avx2() {
#if CHILLOPT_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct State {
  d::Ops ops;
  Backend backend;
  State() { reset(); }
  void reset() {
#if CHILLOPT_HAVE_AVX2
    if (cpu_has_avx2()) {
      ops = d::avx2_ops();
      backend = Backend::avx2;
      return;
    }
#endif
    ops = d::scalar_ops();
    backend = Backend::scalar;
  }
};

State& state() {
  static State s;
  return s;
}

}  // namespace

namespace detail {
Ops scalar_ops() { return Ops{sum_scalar, dot_scalar, axpy_scalar, tanh_scalar}; }
}  // namespace detail

Backend active_backend() { return state().backend; }

bool backend_supported(Backend b) {
  return b == Backend::scalar || (b == Backend::avx2 && cpu_has_avx2());
}

void force_backend(Backend b) {
  if (!backend_supported(b))
    throw std::runtime_error("kernel backend not supported on this cpu: " +
                             std::string(backend_name(b)));
  if (b == Backend::scalar) {
    state().ops = detail::scalar_ops();
    state().backend = Backend::scalar;
  } else {
#if CHILLOPT_HAVE_AVX2
    state().ops = detail::avx2_ops();
    state().backend = Backend::avx2;
#endif
  }
}

void reset_backend() { state().reset(); }

const char* backend_name(Backend b) {
  return b == Backend::scalar ? "scalar" : "avx2";
}

double sum(const double* x, std::size_t n) { return state().ops.sum(x, n); }

double dot(const double* x, const double* y, std::size_t n) {
  return state().ops.dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  state().ops.axpy(a, x, y, n);
}

void tanh_eval(const double* x, double* out, std::size_t n) {
  state().ops.tanh_eval(x, out, n);
}

}  // namespace chillopt::kern
