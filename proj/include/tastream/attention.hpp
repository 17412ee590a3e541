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

// Span-masked scaled dot-product attention. Query t may attend to every key
// s <= t + lookahead; past context is unbounded. Masked logits are treated
// as -inf, so disallowed positions get exactly zero weight and their key and
// value rows are never read.

#pragma once

#include <span>
#include <vector>

#include "tastream/simd/kernels.hpp"

namespace tastream {

// Row-major real matrix with finite entries, at least 1x1.
class FeatureMatrix {
 public:
  FeatureMatrix(int rows, int dim, std::vector<double> values);

  int rows() const { return rows_; }
  int dim() const { return dim_; }
  std::span<const double> row(int r) const {
    return {values_.data() + static_cast<std::size_t>(r) * dim_, static_cast<std::size_t>(dim_)};
  }
  double operator()(int r, int c) const {
    return values_[static_cast<std::size_t>(r) * dim_ + c];
  }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const FeatureMatrix&) const = default;

 private:
  int rows_;
  int dim_;
  std::vector<double> values_;
};

struct SpanMask {
  int num_queries = 0;
  int num_keys = 0;
  int lookahead = 0;

  bool allowed(int query, int key) const { return key <= query + lookahead; }
  // Last key query t may read; key 0 is always allowed.
  int last_allowed(int query) const;
};

SpanMask BuildSpanMask(int num_queries, int num_keys, int lookahead);

// Row-stochastic weights, num_queries x num_keys, row-major; zero outside
// the mask.
std::vector<double> AttentionWeights(const FeatureMatrix& q, const FeatureMatrix& k,
                                     const SpanMask& mask,
                                     const simd::KernelTable& kernels = simd::ActiveKernels());

// softmax(Q K^T / sqrt(d_k) restricted to the mask) V.
FeatureMatrix MaskedAttention(const FeatureMatrix& q, const FeatureMatrix& k,
                              const FeatureMatrix& v, const SpanMask& mask,
                              const simd::KernelTable& kernels = simd::ActiveKernels());

}  // namespace tastream
