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

#include <cmath>
#include <cstddef>
#include <cstdint>

// Shared constants and the scalar tail paths. Both backends include this
// header; the AVX2 translation unit mirrors every operation and its order.
namespace chillopt::kern::detail {

struct Ops {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*tanh_eval)(const double*, double*, std::size_t);
};

Ops scalar_ops();
#if CHILLOPT_HAVE_AVX2
Ops avx2_ops();
#endif

// exp() reduction constants (Cody-Waite split) and the rational kernel
// coefficients for exp(r) = 1 + 2 r P(r^2) / (Q(r^2) - r P(r^2)) on
// |r| <= ln(2)/2.
inline constexpr double kLog2e = 1.4426950408889634073599;
inline constexpr double kLn2Hi = 6.93145751953125e-1;
inline constexpr double kLn2Lo = 1.42860682030941723212e-6;
inline constexpr double kExpP0 = 1.26177193074810590878e-4;
inline constexpr double kExpP1 = 3.02994407707441961300e-2;
inline constexpr double kExpP2 = 9.99999999999999999910e-1;
inline constexpr double kExpQ0 = 3.00198505138664455042e-6;
inline constexpr double kExpQ1 = 2.52448340349684104192e-3;
inline constexpr double kExpQ2 = 2.27265548208155028766e-1;
inline constexpr double kExpQ3 = 2.00000000000000000005e0;

// |x| beyond this tanh is +-1 to double precision; clamping first keeps the
// exponent arithmetic in range.
inline constexpr double kTanhClamp = 20.0;

// Scalar tanh of one element, the exact op sequence the AVX2 path uses.
// expm1(-2|x|) is computed without cancellation (the rational kernel yields
// exp(r)-1 directly when no scaling step is needed), then
// tanh(|x|) = -em / (2 + em).
inline double tanh_one(double x) {
  double a = std::fabs(x);
  a = a > kTanhClamp ? kTanhClamp : a;
  const double y = a * -2.0;  // y in [-40, 0]
  const double kd = std::nearbyint(y * kLog2e);
  double r = std::fma(-kd, kLn2Hi, y);
  r = std::fma(-kd, kLn2Lo, r);
  const double xx = r * r;
  const double pp = std::fma(std::fma(kExpP0, xx, kExpP1), xx, kExpP2);
  const double px = pp * r;
  const double qx =
      std::fma(std::fma(std::fma(kExpQ0, xx, kExpQ1), xx, kExpQ2), xx, kExpQ3);
  const double s2 = px / (qx - px);
  const double s = s2 + s2;  // expm1(r)
  double em;
  if (kd == 0.0) {
    em = s;
  } else {
    const std::int64_t k = static_cast<std::int64_t>(kd);
    const std::uint64_t bits = static_cast<std::uint64_t>(1023 + k) << 52;
    double factor;
    __builtin_memcpy(&factor, &bits, sizeof factor);
    em = std::fma(s, factor, factor) - 1.0;  // exp(y) - 1
  }
  const double q = em / (2.0 + em);
  return std::copysign(-q, x);
}

// Scalar dot-product tail (n % 8 trailing elements), shared verbatim.
inline double dot_tail(const double* x, const double* y, std::size_t i,
                       std::size_t n) {
  double t = 0.0;
  for (; i < n; ++i) t = std::fma(x[i], y[i], t);
  return t;
}

inline double sum_tail(const double* x, std::size_t i, std::size_t n) {
  double t = 0.0;
  for (; i < n; ++i) t += x[i];
  return t;
}

}  // namespace chillopt::kern::detail
