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

// Double-precision vector kernels used by the inner loops of attention and
// emission-row processing. Every kernel has a scalar reference version; the
// AVX2 and NEON versions must agree with it (exactly for max/argmax, to
// rounding for the accumulating kernels). The active table is picked once
// per process from CPU features; TASTREAM_SIMD=scalar forces the reference.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace tastream::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  std::string_view name;

  // sum_i a[i] * b[i]; a and b have equal length.
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // Largest element; -inf for n == 0. Elements are finite or -inf.
  double (*max_value)(const double* x, std::size_t n);
  // Index of the first largest element; 0 for n == 0.
  std::size_t (*argmax)(const double* x, std::size_t n);
  // out[i] = exp(x[i] - shift) with exp(-inf) = 0; returns sum_i out[i].
  // out may alias x. Callers keep x[i] - shift <= 0.
  double (*exp_shifted)(const double* x, double shift, double* out, std::size_t n);
};

const KernelTable& ScalarKernels();

// nullptr when the ISA was not compiled in or the CPU lacks it.
const KernelTable* Avx2Kernels();
const KernelTable* NeonKernels();

// The table chosen for this process.
const KernelTable& ActiveKernels();

// Convenience wrappers over ActiveKernels().
inline double Dot(std::span<const double> a, std::span<const double> b) {
  return ActiveKernels().dot(a.data(), b.data(), a.size());
}
inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  ActiveKernels().axpy(alpha, x.data(), y.data(), x.size());
}
inline double MaxValue(std::span<const double> x) {
  return ActiveKernels().max_value(x.data(), x.size());
}
inline std::size_t ArgMax(std::span<const double> x) {
  return ActiveKernels().argmax(x.data(), x.size());
}

// log sum_i exp(x[i]); -inf when every element is -inf.
double LogSumExp(std::span<const double> x, const KernelTable& k = ActiveKernels());

}  // namespace tastream::simd
