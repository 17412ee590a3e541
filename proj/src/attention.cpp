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

#include "tastream/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tastream/errors.hpp"

namespace tastream {

FeatureMatrix::FeatureMatrix(int rows, int dim, std::vector<double> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
  if (rows_ < 1 || dim_ < 1) throw InputError("feature matrix must be at least 1x1");
  if (values_.size() != static_cast<std::size_t>(rows_) * dim_)
    throw InputError("feature values do not match " + std::to_string(rows_) + "x" +
                     std::to_string(dim_));
  for (double v : values_)
    if (!std::isfinite(v)) throw InputError("feature entries must be finite");
}

int SpanMask::last_allowed(int query) const {
  return std::min(query + lookahead, num_keys - 1);
}

SpanMask BuildSpanMask(int num_queries, int num_keys, int lookahead) {
  if (num_queries < 1 || num_keys < 1) throw InputError("mask dimensions must be >= 1");
  if (lookahead < 0) throw InputError("lookahead must be >= 0");
  return SpanMask{num_queries, num_keys, lookahead};
}

namespace {

void CheckShapes(const FeatureMatrix& q, const FeatureMatrix& k, const SpanMask& mask) {
  if (q.rows() != mask.num_queries)
    throw InputError("query rows " + std::to_string(q.rows()) + " != mask queries " +
                     std::to_string(mask.num_queries));
  if (k.rows() != mask.num_keys)
    throw InputError("key rows " + std::to_string(k.rows()) + " != mask keys " +
                     std::to_string(mask.num_keys));
  if (q.dim() != k.dim())
    throw InputError("query dim " + std::to_string(q.dim()) + " != key dim " +
                     std::to_string(k.dim()));
}

// Fills w[0..n) with the normalized weights of query t over keys 0..n-1,
// where n = mask.last_allowed(t) + 1. Returns n.
int RowWeights(const FeatureMatrix& q, const FeatureMatrix& k, const SpanMask& mask, int t,
               const simd::KernelTable& kernels, std::vector<double>& w) {
  const int n = mask.last_allowed(t) + 1;
  const double scale = 1.0 / std::sqrt(static_cast<double>(k.dim()));
  w.resize(n);
  const auto qt = q.row(t);
  for (int s = 0; s < n; ++s)
    w[s] = kernels.dot(qt.data(), k.row(s).data(), qt.size()) * scale;
  const double m = kernels.max_value(w.data(), n);
  const double sum = kernels.exp_shifted(w.data(), m, w.data(), n);
  const double inv = 1.0 / sum;
  for (int s = 0; s < n; ++s) w[s] *= inv;
  return n;
}

}  // namespace

std::vector<double> AttentionWeights(const FeatureMatrix& q, const FeatureMatrix& k,
                                     const SpanMask& mask, const simd::KernelTable& kernels) {
  CheckShapes(q, k, mask);
  std::vector<double> out(static_cast<std::size_t>(mask.num_queries) * mask.num_keys, 0.0);
  std::vector<double> w;
  for (int t = 0; t < mask.num_queries; ++t) {
    const int n = RowWeights(q, k, mask, t, kernels, w);
    std::copy_n(w.begin(), n, out.begin() + static_cast<std::ptrdiff_t>(t) * mask.num_keys);
  }
  return out;
}

FeatureMatrix MaskedAttention(const FeatureMatrix& q, const FeatureMatrix& k,
                              const FeatureMatrix& v, const SpanMask& mask,
                              const simd::KernelTable& kernels) {
  CheckShapes(q, k, mask);
  if (v.rows() != mask.num_keys)
    throw InputError("value rows " + std::to_string(v.rows()) + " != mask keys " +
                     std::to_string(mask.num_keys));
  const int dv = v.dim();
  std::vector<double> out(static_cast<std::size_t>(mask.num_queries) * dv, 0.0);
  std::vector<double> w;
  for (int t = 0; t < mask.num_queries; ++t) {
    const int n = RowWeights(q, k, mask, t, kernels, w);
    double* dst = out.data() + static_cast<std::size_t>(t) * dv;
    for (int s = 0; s < n; ++s) kernels.axpy(w[s], v.row(s).data(), dst, dv);
  }
  return FeatureMatrix(mask.num_queries, dv, std::move(out));
}

}  // namespace tastream
