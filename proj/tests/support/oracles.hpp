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

// Brute-force reference computations for the test suites. Nothing here
// calls the decoders under test; each oracle enumerates paths or
// transcripts directly.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "tastream/attention.hpp"
#include "tastream/lattice.hpp"
#include "tastream/trigger_decode.hpp"

namespace tastream::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double NaiveLogAdd(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Independent collapse: merge repeats, drop zeros.
inline std::vector<int> NaiveCollapse(const std::vector<int>& path) {
  std::vector<int> out;
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (path[t] == 0) continue;
    if (t > 0 && path[t - 1] == path[t]) continue;
    out.push_back(path[t]);
  }
  return out;
}

// Calls fn(path) for every length-T sequence over [0, num_labels).
inline void ForEachPath(int T, int num_labels, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> path(T, 0);
  for (;;) {
    fn(path);
    int i = T - 1;
    while (i >= 0 && ++path[i] == num_labels) path[i--] = 0;
    if (i < 0) return;
  }
}

inline double PathLogProb(const EmissionMatrix& e, const std::vector<int>& path) {
  double lp = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) lp += e(static_cast<int>(t), path[t]);
  return lp;
}

// Prefix of e: the first `frames` rows.
inline EmissionMatrix Truncate(const EmissionMatrix& e, int frames) {
  std::vector<double> v(e.values().begin(), e.values().begin() + frames * e.num_labels());
  return EmissionMatrix(frames, e.num_labels(), std::move(v));
}

inline double BruteCtcLogProb(const EmissionMatrix& e, const std::vector<int>& y) {
  double acc = -kInf;
  ForEachPath(e.num_frames(), e.num_labels(), [&](const std::vector<int>& p) {
    if (NaiveCollapse(p) == y) acc = NaiveLogAdd(acc, PathLogProb(e, p));
  });
  return acc;
}

// BruteCtcLogProb for every transcript at once: one pass over all paths,
// binning each path's mass under its collapse. Absent keys are -inf.
inline std::map<std::vector<int>, double> BruteCtcTable(const EmissionMatrix& e) {
  std::map<std::vector<int>, double> out;
  ForEachPath(e.num_frames(), e.num_labels(), [&](const std::vector<int>& p) {
    auto [it, fresh] = out.try_emplace(NaiveCollapse(p), -kInf);
    it->second = NaiveLogAdd(it->second, PathLogProb(e, p));
  });
  return out;
}

inline double BruteViterbiLogProb(const EmissionMatrix& e, const std::vector<int>& y) {
  double best = -kInf;
  ForEachPath(e.num_frames(), e.num_labels(), [&](const std::vector<int>& p) {
    if (NaiveCollapse(p) == y) best = std::max(best, PathLogProb(e, p));
  });
  return best;
}

// Every blank-free sequence over tokens 1..num_tokens of length <= max_len,
// shortest first.
inline std::vector<std::vector<int>> AllTranscripts(int max_len, int num_tokens) {
  std::vector<std::vector<int>> out{{}};
  std::vector<std::vector<int>> layer{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& s : layer)
      for (int c = 1; c <= num_tokens; ++c) {
        auto t = s;
        t.push_back(c);
        next.push_back(t);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

// Earliest frame t such that some positive-probability path over frames
// 0..t collapses to `prefix`; -1 if none.
inline int FirstReachableFrame(const EmissionMatrix& e, const std::vector<int>& prefix) {
  for (int t = 0; t < e.num_frames(); ++t) {
    bool found = false;
    ForEachPath(t + 1, e.num_labels(), [&](const std::vector<int>& p) {
      if (!found && NaiveCollapse(p) == prefix && PathLogProb(e, p) > -kInf) found = true;
    });
    if (found) return t;
  }
  return -1;
}

struct JointOracleResult {
  std::vector<int> transcript;
  double combined = -kInf;
};

// Exhaustive joint CTC + triggered-attention score over every transcript,
// with each token's attention queried at the frame where its prefix first
// becomes reachable. Valid when no beam pruning happens.
inline JointOracleResult BruteJointDecode(const EmissionMatrix& e, AttentionScorer& scorer,
                                          int delta, double weight) {
  const int T = e.num_frames();
  const int V = e.num_labels() - 1;
  JointOracleResult best;
  bool have = false;
  for (const auto& y : AllTranscripts(T, V)) {
    const double ctc = BruteCtcLogProb(e, y);
    if (ctc == -kInf) continue;
    double att = 0.0;
    for (std::size_t l = 0; l < y.size(); ++l) {
      std::vector<int> upto(y.begin(), y.begin() + l + 1);
      const int n = FirstReachableFrame(e, upto);
      Transcript prefix{std::vector<int>(y.begin(), y.begin() + l)};
      att += scorer.ScoreNext(prefix, std::min(n + delta, T - 1))[y[l] - 1];
    }
    att += scorer.ScoreNext(Transcript{y}, T - 1)[V];
    double combined;
    if (weight == 0.0)
      combined = ctc;
    else if (weight == 1.0)
      combined = att;
    else
      combined = weight * att + (1.0 - weight) * ctc;
    if (!have || combined > best.combined ||
        (combined == best.combined && y < best.transcript)) {
      best = {y, combined};
      have = true;
    }
  }
  return best;
}

// softmax over a full row with masked logits set to -inf, via std::exp.
inline std::vector<double> NaiveMaskedAttention(const FeatureMatrix& q, const FeatureMatrix& k,
                                                const FeatureMatrix& v, int lookahead,
                                                std::vector<double>* weights = nullptr) {
  const int nq = q.rows(), nk = k.rows(), dv = v.dim();
  std::vector<double> out(static_cast<std::size_t>(nq) * dv, 0.0);
  if (weights) weights->assign(static_cast<std::size_t>(nq) * nk, 0.0);
  for (int t = 0; t < nq; ++t) {
    std::vector<double> logits(nk, -kInf);
    double m = -kInf;
    for (int s = 0; s < nk; ++s) {
      if (s > t + lookahead) continue;
      double dot = 0.0;
      for (int d = 0; d < q.dim(); ++d) dot += q(t, d) * k(s, d);
      logits[s] = dot / std::sqrt(static_cast<double>(q.dim()));
      m = std::max(m, logits[s]);
    }
    double z = 0.0;
    for (int s = 0; s < nk; ++s) z += logits[s] == -kInf ? 0.0 : std::exp(logits[s] - m);
    for (int s = 0; s < nk; ++s) {
      const double w = logits[s] == -kInf ? 0.0 : std::exp(logits[s] - m) / z;
      if (weights) (*weights)[static_cast<std::size_t>(t) * nk + s] = w;
      for (int d = 0; d < dv; ++d) out[static_cast<std::size_t>(t) * dv + d] += w * v(s, d);
    }
  }
  return out;
}

// Rows of softmax(scale * N(0, 1)) in the log domain.
inline EmissionMatrix RandomEmissions(std::mt19937_64& rng, int T, int num_labels,
                                      double scale = 1.5) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v;
  for (int t = 0; t < T; ++t) {
    std::vector<double> row(num_labels);
    double m = -kInf;
    for (double& x : row) {
      x = scale * normal(rng);
      m = std::max(m, x);
    }
    double z = 0.0;
    for (double x : row) z += std::exp(x - m);
    for (double& x : row) x -= m + std::log(z);
    v.insert(v.end(), row.begin(), row.end());
  }
  return EmissionMatrix(T, num_labels, std::move(v));
}

// Random normalized log-distribution of length n.
inline std::vector<double> RandomLogDist(std::mt19937_64& rng, int n, double scale = 1.5) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> row(n);
  double m = -kInf;
  for (double& x : row) {
    x = scale * normal(rng);
    m = std::max(m, x);
  }
  double z = 0.0;
  for (double x : row) z += std::exp(x - m);
  for (double& x : row) x -= m + std::log(z);
  return row;
}

// Lattice whose rows put all mass on one label per frame.
inline EmissionMatrix OneHotEmissions(const std::vector<int>& labels, int num_labels) {
  std::vector<double> v;
  for (int lab : labels)
    for (int c = 0; c < num_labels; ++c) v.push_back(c == lab ? 0.0 : -kInf);
  return EmissionMatrix(static_cast<int>(labels.size()), num_labels, std::move(v));
}

}  // namespace tastream::testing
