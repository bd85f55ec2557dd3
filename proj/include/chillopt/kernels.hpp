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

#pragma once

#include <cstddef>
#include <string>

// Data-parallel arithmetic kernels used by the regressor and the metrics.
// Each kernel has a scalar reference implementation and an AVX2 variant; the
// backend is selected once at runtime from CPUID. The two implementations of
// every kernel are bit-identical: the scalar reference mirrors the SIMD
// accumulator layout, reduction order, and fused-multiply-add usage, so
// results do not depend on which backend the dispatcher picked.
namespace chillopt::kern {

enum class Backend { scalar, avx2 };

// Backend currently in use (auto-detected on first use).
Backend active_backend();

// True if the given backend can run on this machine.
bool backend_supported(Backend b);

// Force a backend, e.g. to cross-check both in tests. Throws if unsupported.
void force_backend(Backend b);

// Reset to auto-detection.
void reset_backend();

const char* backend_name(Backend b);

// sum(x) with a fixed blocked reduction order.
double sum(const double* x, std::size_t n);

// dot(x, y) with a fixed blocked reduction order and fused multiply-adds.
double dot(const double* x, const double* y, std::size_t n);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// out[i] = tanh(x[i]) via a rational approximation (|err| < 1e-12 vs the
// exact function; see tests). Inputs must be finite.
void tanh_eval(const double* x, double* out, std::size_t n);

// RAII helper for tests that need to pin a backend.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b) { force_backend(b); }
  ~ScopedBackend() { reset_backend(); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;
};

}  // namespace chillopt::kern
