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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string_view>

#include "kernels_internal.hpp"
#include "tastream/simd/kernels.hpp"

namespace tastream::simd {

#if defined(TASTREAM_HAVE_AVX2)
const KernelTable* Avx2Kernels() {
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? internal::Avx2Table() : nullptr;
}
#else
const KernelTable* Avx2Kernels() { return nullptr; }
#endif

#if defined(TASTREAM_HAVE_NEON)
// Advanced SIMD is mandatory on AArch64.
const KernelTable* NeonKernels() { return internal::NeonTable(); }
#else
const KernelTable* NeonKernels() { return nullptr; }
#endif

namespace {

const KernelTable& Select() {
  if (const char* env = std::getenv("TASTREAM_SIMD")) {
    if (std::string_view(env) == "scalar") return ScalarKernels();
  }
  if (const KernelTable* k = Avx2Kernels()) return *k;
  if (const KernelTable* k = NeonKernels()) return *k;
  return ScalarKernels();
}

}  // namespace

const KernelTable& ActiveKernels() {
  static const KernelTable& active = Select();
  return active;
}

double LogSumExp(std::span<const double> x, const KernelTable& k) {
  const double m = k.max_value(x.data(), x.size());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double sum = 0.0;
  // Small fixed scratch keeps this allocation-free for the label counts
  // seen in practice; longer rows go through in chunks.
  double scratch[256];
  for (std::size_t off = 0; off < x.size(); off += 256) {
    const std::size_t len = std::min<std::size_t>(256, x.size() - off);
    sum += k.exp_shifted(x.data() + off, m, scratch, len);
  }
  return m + std::log(sum);
}

}  // namespace tastream::simd
