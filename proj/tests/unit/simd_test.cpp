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

#include "tastream/simd/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include <gtest/gtest.h>

namespace tastream::simd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<const KernelTable*> VectorTables() {
  std::vector<const KernelTable*> out;
  if (const KernelTable* k = Avx2Kernels()) out.push_back(k);
  if (const KernelTable* k = NeonKernels()) out.push_back(k);
  return out;
}

std::vector<double> RandomVector(std::mt19937_64& rng, std::size_t n, double neg_inf_rate) {
  std::normal_distribution<double> normal(0.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = unit(rng) < neg_inf_rate ? -kInf : normal(rng);
  return v;
}

bool Close(double got, double want, double rel) {
  if (got == want) return true;
  return std::abs(got - want) <= rel * std::abs(want) + 1e-300;
}

TEST(Kernels, ScalarTableIsReference) {
  const KernelTable& s = ScalarKernels();
  EXPECT_EQ(s.isa, Isa::kScalar);
  const double x[] = {1.0, 3.0, -2.0, 3.0};
  const double y[] = {2.0, 0.5, 1.0, 1.0};
  EXPECT_EQ(s.dot(x, y, 4), 2.0 + 1.5 - 2.0 + 3.0);
  EXPECT_EQ(s.max_value(x, 4), 3.0);
  EXPECT_EQ(s.argmax(x, 4), 1u);
  EXPECT_EQ(s.max_value(x, 0), -kInf);
  EXPECT_EQ(s.argmax(x, 0), 0u);
  double out[4];
  EXPECT_DOUBLE_EQ(s.exp_shifted(x, 3.0, out, 4), std::exp(-2.0) + 1 + std::exp(-5.0) + 1);
}

TEST(Kernels, ForcedScalarSelection) {
  const char* env = std::getenv("TASTREAM_SIMD");
  if (env && std::string_view(env) == "scalar") {
    EXPECT_EQ(ActiveKernels().isa, Isa::kScalar);
  } else if (!VectorTables().empty()) {
    EXPECT_NE(ActiveKernels().isa, Isa::kScalar);
  }
}

TEST(Kernels, VectorTablesMatchScalar) {
  const KernelTable& ref = ScalarKernels();
  std::mt19937_64 rng(3);
  for (const KernelTable* k : VectorTables()) {
    SCOPED_TRACE(std::string(k->name));
    for (std::size_t n = 0; n <= 67; ++n) {
      for (int rep = 0; rep < 20; ++rep) {
        const auto a = RandomVector(rng, n, 0.0);
        const auto b = RandomVector(rng, n, 0.0);
        const auto c = RandomVector(rng, n, rep % 3 == 0 ? 0.3 : 0.0);

        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
        EXPECT_NEAR(k->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n),
                    1e-14 * scale + 1e-300);

        auto y1 = b, y2 = b;
        k->axpy(0.37, a.data(), y1.data(), n);
        ref.axpy(0.37, a.data(), y2.data(), n);
        // The vector version may fuse the multiply-add, so the bound is
        // relative to the operands rather than the result.
        for (std::size_t i = 0; i < n; ++i)
          EXPECT_NEAR(y1[i], y2[i], 4e-16 * (std::abs(b[i]) + std::abs(0.37 * a[i])));

        EXPECT_EQ(k->max_value(c.data(), n), ref.max_value(c.data(), n));
        EXPECT_EQ(k->argmax(c.data(), n), ref.argmax(c.data(), n));

        const double m = ref.max_value(c.data(), n);
        if (n == 0 || m == -kInf) continue;
        std::vector<double> e1(n), e2(n);
        const double s1 = k->exp_shifted(c.data(), m, e1.data(), n);
        const double s2 = ref.exp_shifted(c.data(), m, e2.data(), n);
        EXPECT_TRUE(Close(s1, s2, 1e-14)) << s1 << " vs " << s2;
        for (std::size_t i = 0; i < n; ++i) EXPECT_TRUE(Close(e1[i], e2[i], 1e-14)) << c[i] - m;
      }
    }
  }
}

TEST(Kernels, ArgMaxFirstOfTies) {
  for (const KernelTable* k : VectorTables()) {
    for (std::size_t n = 1; n <= 33; ++n) {
      std::vector<double> x(n, -1.0);
      for (std::size_t i = n / 3; i < n; i += 5) x[i] = 2.0;
      EXPECT_EQ(k->argmax(x.data(), n), ScalarKernels().argmax(x.data(), n)) << n;
      std::vector<double> all(n, -kInf);
      EXPECT_EQ(k->argmax(all.data(), n), 0u);
      EXPECT_EQ(k->max_value(all.data(), n), -kInf);
    }
  }
}

TEST(Kernels, ExpAcrossRange) {
  std::vector<double> x;
  for (double v = -745.0; v <= 0.0; v += 0.173) x.push_back(v);
  x.push_back(-kInf);
  x.push_back(0.0);
  for (const KernelTable* k : VectorTables()) {
    std::vector<double> out(x.size());
    k->exp_shifted(x.data(), 0.0, out.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double want = std::exp(x[i]);
      // Below the underflow cutoff only denormals are lost.
      if (x[i] < -708.0)
        EXPECT_LT(std::abs(out[i] - want), 1e-307);
      else
        EXPECT_TRUE(Close(out[i], want, 4e-16)) << x[i] << " " << out[i] << " " << want;
    }
  }
}

TEST(LogSumExp, MatchesDirectSum) {
  std::mt19937_64 rng(5);
  for (std::size_t n : {1u, 2u, 7u, 255u, 256u, 257u, 600u}) {
    const auto x = RandomVector(rng, n, 0.1);
    double m = -kInf;
    for (double v : x) m = std::max(m, v);
    double sum = 0.0;
    for (double v : x) sum += std::exp(v - m);
    const double want = m + std::log(sum);
    EXPECT_NEAR(LogSumExp(x, ScalarKernels()), want, 1e-12);
    for (const KernelTable* k : VectorTables()) EXPECT_NEAR(LogSumExp(x, *k), want, 1e-12);
  }
  const std::vector<double> empty_mass(4, -kInf);
  EXPECT_EQ(LogSumExp(empty_mass), -kInf);
}

}  // namespace
}  // namespace tastream::simd
