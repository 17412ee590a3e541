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

#pragma once

#include "tastream/simd/kernels.hpp"

namespace tastream::simd::internal {

// Defined in the ISA-specific translation units, which are only compiled
// on matching targets. They return the table without checking the CPU.
const KernelTable* Avx2Table();
const KernelTable* NeonTable();

// Range-reduction constants shared by the vector exp implementations:
// exp(x) = 2^k * exp(r), r = x - k*ln2, |r| <= ln2/2, and exp(r) by a
// degree-13 Taylor polynomial (truncation error below 1e-17 relative).
inline constexpr double kLog2e = 1.4426950408889634074;
inline constexpr double kLn2Hi = 6.93145751953125e-1;
inline constexpr double kLn2Lo = 1.42860682030941723212e-6;
// Below this exp underflows past the normal range; such lanes return 0.
inline constexpr double kExpUnderflow = -708.0;
inline constexpr double kExpCoeffs[14] = {
    1.0,
    1.0,
    1.0 / 2,
    1.0 / 6,
    1.0 / 24,
    1.0 / 120,
    1.0 / 720,
    1.0 / 5040,
    1.0 / 40320,
    1.0 / 362880,
    1.0 / 3628800,
    1.0 / 39916800,
    1.0 / 479001600,
    1.0 / 6227020800,
};

}  // namespace tastream::simd::internal
