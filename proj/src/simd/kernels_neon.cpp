/* Copyright 2026 The tastream Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <arm_neon.h>

#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace tastream::simd {
namespace {

double DotNeon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void AxpyNeon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double MaxNeon(const double* x, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 2) {
    float64x2_t vmax = vld1q_f64(x);
    for (i = 2; i + 2 <= n; i += 2) vmax = vmaxq_f64(vmax, vld1q_f64(x + i));
    best = vmaxvq_f64(vmax);
  }
  for (; i < n; ++i)
    if (x[i] > best) best = x[i];
  return best;
}

std::size_t ArgMaxNeon(const double* x, std::size_t n) {
  if (n == 0) return 0;
  const double best = MaxNeon(x, n);
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] == best) return i;
  return 0;
}

inline float64x2_t ExpNeon(float64x2_t x) {
  using namespace internal;
  const uint64x2_t underflow = vcltq_f64(x, vdupq_n_f64(kExpUnderflow));
  x = vmaxq_f64(x, vdupq_n_f64(kExpUnderflow));
  const float64x2_t k = vrndnq_f64(vmulq_f64(x, vdupq_n_f64(kLog2e)));
  float64x2_t r = vfmsq_f64(x, k, vdupq_n_f64(kLn2Hi));
  r = vfmsq_f64(r, k, vdupq_n_f64(kLn2Lo));
  float64x2_t p = vdupq_n_f64(kExpCoeffs[13]);
  for (int c = 12; c >= 0; --c) p = vfmaq_f64(vdupq_n_f64(kExpCoeffs[c]), p, r);
  const int64x2_t bits = vshlq_n_s64(vaddq_s64(vcvtq_s64_f64(k), vdupq_n_s64(1023)), 52);
  const float64x2_t result = vmulq_f64(p, vreinterpretq_f64_s64(bits));
  return vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(result), underflow));
}

double ExpShiftedNeon(const double* x, double shift, double* out, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(shift);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t e = ExpNeon(vsubq_f64(vld1q_f64(x + i), vs));
    vst1q_f64(out + i, e);
    acc = vaddq_f64(acc, e);
  }
  double sum = vaddvq_f64(acc);
  for (; i < n; ++i) {
    out[i] = std::exp(x[i] - shift);
    sum += out[i];
  }
  return sum;
}

constexpr KernelTable kNeon{Isa::kNeon, "neon",     DotNeon,       AxpyNeon,
                            MaxNeon,    ArgMaxNeon, ExpShiftedNeon};

}  // namespace

const KernelTable* internal::NeonTable() { return &kNeon; }

}  // namespace tastream::simd
