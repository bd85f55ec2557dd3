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

// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and entered only after a CPUID check. Every operation mirrors
// the scalar reference in kernels.cpp element for element: same accumulator
// banks, same combine order, same fused ops, so the results are bit-equal.

#if CHILLOPT_HAVE_AVX2

#include <immintrin.h>

#include "kernels_detail.hpp"

namespace chillopt::kern::detail {
namespace {

inline double combine(__m256d accA, __m256d accB) {
  const __m256d c = _mm256_add_pd(accA, accB);  // c_l = accA_l + accB_l
  const __m128d lo = _mm256_castpd256_pd128(c);        // (c0, c1)
  const __m128d hi = _mm256_extractf128_pd(c, 1);      // (c2, c3)
  const __m128d p = _mm_add_pd(lo, hi);                // (c0+c2, c1+c3)
  return _mm_cvtsd_f64(p) + _mm_cvtsd_f64(_mm_unpackhi_pd(p, p));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d a = _mm256_setzero_pd();
  __m256d b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a = _mm256_add_pd(a, _mm256_loadu_pd(x + i));
    b = _mm256_add_pd(b, _mm256_loadu_pd(x + i + 4));
  }
  return combine(a, b) + sum_tail(x, i, n);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a = _mm256_setzero_pd();
  __m256d b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a);
    b = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), b);
  }
  return combine(a, b) + dot_tail(x, y, i, n);
}

void axpy_avx2(double s, const double* x, double* y, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + i),
                                       _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = std::fma(s, x[i], y[i]);
}

// Vector mirror of tanh_one(); see kernels_detail.hpp for the derivation.
inline __m256d tanh4(__m256d vx) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d abs_x = _mm256_andnot_pd(sign_mask, vx);
  const __m256d clamped =
      _mm256_min_pd(abs_x, _mm256_set1_pd(kTanhClamp));
  const __m256d y = _mm256_mul_pd(clamped, _mm256_set1_pd(-2.0));

  const __m256d kd = _mm256_round_pd(
      _mm256_mul_pd(y, _mm256_set1_pd(kLog2e)),
      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(kd, _mm256_set1_pd(kLn2Hi), y);
  r = _mm256_fnmadd_pd(kd, _mm256_set1_pd(kLn2Lo), r);

  const __m256d xx = _mm256_mul_pd(r, r);
  __m256d pp = _mm256_fmadd_pd(_mm256_set1_pd(kExpP0), xx,
                               _mm256_set1_pd(kExpP1));
  pp = _mm256_fmadd_pd(pp, xx, _mm256_set1_pd(kExpP2));
  const __m256d px = _mm256_mul_pd(pp, r);
  __m256d qx = _mm256_fmadd_pd(_mm256_set1_pd(kExpQ0), xx,
                               _mm256_set1_pd(kExpQ1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(kExpQ2));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(kExpQ3));
  const __m256d s2 = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  const __m256d s = _mm256_add_pd(s2, s2);  // expm1(r)

  // 2^k via exponent-field construction; k in [-58, 0].
  const __m128i k32 = _mm256_cvtpd_epi32(kd);
  const __m256i k64 = _mm256_cvtepi32_epi64(k32);
  const __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  const __m256d factor = _mm256_castsi256_pd(bits);
  const __m256d em_scaled = _mm256_sub_pd(_mm256_fmadd_pd(s, factor, factor),
                                          _mm256_set1_pd(1.0));
  const __m256d k_is_zero =
      _mm256_cmp_pd(kd, _mm256_setzero_pd(), _CMP_EQ_OQ);
  const __m256d em = _mm256_blendv_pd(em_scaled, s, k_is_zero);

  const __m256d q = _mm256_div_pd(em, _mm256_add_pd(_mm256_set1_pd(2.0), em));
  const __m256d mag = _mm256_andnot_pd(sign_mask, _mm256_sub_pd(
      _mm256_setzero_pd(), q));
  return _mm256_or_pd(_mm256_and_pd(vx, sign_mask), mag);
}

void tanh_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, tanh4(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = tanh_one(x[i]);
}

}  // namespace

Ops avx2_ops() { return Ops{sum_avx2, dot_avx2, axpy_avx2, tanh_avx2}; }

}  // namespace chillopt::kern::detail

#endif  // CHILLOPT_HAVE_AVX2
