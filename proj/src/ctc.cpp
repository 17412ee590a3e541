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

#include "tastream/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "tastream/errors.hpp"
#include "tastream/simd/kernels.hpp"

namespace tastream {
namespace {

void CheckTranscript(const Transcript& y, int num_labels) {
  for (TokenId id : y.labels) {
    if (id <= kBlankId || id >= num_labels)
      throw InputError("transcript label " + std::to_string(id) + " outside [1, " +
                       std::to_string(num_labels) + ")");
  }
}

// Extended label sequence: blank, y1, blank, y2, ..., yL, blank.
std::vector<TokenId> Extend(const Transcript& y) {
  std::vector<TokenId> ext(2 * y.size() + 1, kBlankId);
  for (std::size_t l = 0; l < y.size(); ++l) ext[2 * l + 1] = y.labels[l];
  return ext;
}

// Whether state s may be entered from s-2 (skipping the blank between two
// different tokens).
bool CanSkip(const std::vector<TokenId>& ext, std::size_t s) {
  return s >= 2 && ext[s] != kBlankId && ext[s] != ext[s - 2];
}

}  // namespace

int MinFramesFor(const Transcript& y) {
  int frames = static_cast<int>(y.size());
  for (std::size_t l = 1; l < y.size(); ++l)
    if (y.labels[l] == y.labels[l - 1]) ++frames;
  return frames;
}

double CtcLogProb(const EmissionMatrix& e, const Transcript& y) {
  CheckTranscript(y, e.num_labels());
  const int T = e.num_frames();
  if (MinFramesFor(y) > T) return kNegInf;

  const std::vector<TokenId> ext = Extend(y);
  const std::size_t S = ext.size();
  std::vector<double> alpha(S, kNegInf), next(S);
  alpha[0] = e(0, ext[0]);
  if (S > 1) alpha[1] = e(0, ext[1]);

  for (int t = 1; t < T; ++t) {
    // States that cannot reach the end in the remaining frames still carry
    // mass harmlessly; only the final two states are read.
    for (std::size_t s = 0; s < S; ++s) {
      double acc = alpha[s];
      if (s >= 1) acc = LogAdd(acc, alpha[s - 1]);
      if (CanSkip(ext, s)) acc = LogAdd(acc, alpha[s - 2]);
      next[s] = acc == kNegInf ? kNegInf : acc + e(t, ext[s]);
    }
    alpha.swap(next);
  }
  return S > 1 ? LogAdd(alpha[S - 1], alpha[S - 2]) : alpha[0];
}

GreedyResult CtcGreedy(const EmissionMatrix& e, ConfidenceRule rule) {
  GreedyResult out;
  const int T = e.num_frames();
  out.argmax_path.labels.resize(T);
  for (int t = 0; t < T; ++t)
    out.argmax_path.labels[t] = static_cast<TokenId>(simd::ArgMax(e.row(t)));

  auto finish_run = [&](TokenId label, double best, double sum, int len) {
    out.transcript.labels.push_back(label);
    out.confidences.push_back(rule == ConfidenceRule::kRunMax ? best : sum / len);
  };

  TokenId run_label = kBlankId;
  double run_best = 0.0, run_sum = 0.0;
  int run_len = 0;
  for (int t = 0; t < T; ++t) {
    const TokenId label = out.argmax_path.labels[t];
    if (label != run_label && run_label != kBlankId) finish_run(run_label, run_best, run_sum, run_len);
    if (label != run_label) {
      run_label = label;
      run_best = run_sum = 0.0;
      run_len = 0;
    }
    if (label != kBlankId) {
      const double p = std::exp(e(t, label));
      run_best = std::max(run_best, p);
      run_sum += p;
      ++run_len;
    }
  }
  if (run_label != kBlankId) finish_run(run_label, run_best, run_sum, run_len);
  return out;
}

ForcedAlignment CtcViterbi(const EmissionMatrix& e, const Transcript& y) {
  CheckTranscript(y, e.num_labels());
  const int T = e.num_frames();
  if (MinFramesFor(y) > T)
    throw InfeasibleAlignment("transcript of " + std::to_string(y.size()) + " tokens needs " +
                              std::to_string(MinFramesFor(y)) + " frames, lattice has " +
                              std::to_string(T));

  const std::vector<TokenId> ext = Extend(y);
  const std::size_t S = ext.size();
  // Candidate a beats incumbent b on a tie when a is a blank state and b is
  // not, or both agree on blankness and a has the lower index.
  auto prefer = [&](std::size_t a, std::size_t b) {
    const bool ab = ext[a] == kBlankId, bb = ext[b] == kBlankId;
    if (ab != bb) return ab;
    return a < b;
  };

  std::vector<double> delta(S, kNegInf), next(S);
  std::vector<std::vector<std::size_t>> back(T, std::vector<std::size_t>(S, 0));
  delta[0] = e(0, ext[0]);
  if (S > 1) delta[1] = e(0, ext[1]);

  for (int t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      std::size_t arg = s;
      double best = delta[s];
      auto consider = [&](std::size_t p) {
        if (delta[p] > best || (delta[p] == best && prefer(p, arg))) {
          best = delta[p];
          arg = p;
        }
      };
      if (s >= 1) consider(s - 1);
      if (CanSkip(ext, s)) consider(s - 2);
      back[t][s] = arg;
      next[s] = best == kNegInf ? kNegInf : best + e(t, ext[s]);
    }
    delta.swap(next);
  }

  std::size_t state = S - 1;
  if (S > 1 && (delta[S - 2] > delta[S - 1])) state = S - 2;
  ForcedAlignment out;
  out.log_prob = delta[state];
  if (out.log_prob == kNegInf)
    throw InfeasibleAlignment("no path with nonzero probability spells the transcript");

  std::vector<std::size_t> states(T);
  for (int t = T - 1; t >= 0; --t) {
    states[t] = state;
    if (t > 0) state = back[t][state];
  }
  out.path.labels.resize(T);
  out.triggers.frames.assign(y.size(), -1);
  for (int t = 0; t < T; ++t) {
    const std::size_t s = states[t];
    out.path.labels[t] = ext[s];
    if (s % 2 == 1) {
      const std::size_t l = s / 2;
      if (out.triggers.frames[l] < 0) out.triggers.frames[l] = t;
    }
  }
  return out;
}

std::vector<ScoredTranscript> CtcPrefixBeam(const EmissionMatrix& e, int beam) {
  if (beam < 1) throw InputError("beam must be >= 1");
  struct Mass {
    double blank = kNegInf;
    double nonblank = kNegInf;
    double total() const { return LogAdd(blank, nonblank); }
  };
  using Beam = std::map<Transcript, Mass>;

  auto prune = [beam](Beam& b) {
    std::vector<std::pair<Transcript, Mass>> items;
    items.reserve(b.size());
    for (auto& [prefix, mass] : b)
      if (mass.total() != kNegInf) items.emplace_back(prefix, mass);
    // std::map iteration is already lexicographic, so a stable sort on score
    // keeps the prefix order among equal scores.
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      return a.second.total() > b.second.total();
    });
    if (items.size() > static_cast<std::size_t>(beam)) items.resize(beam);
    b.clear();
    for (auto& [prefix, mass] : items) b.emplace(std::move(prefix), mass);
  };

  const int V = e.num_labels();
  Beam current;
  current[Transcript{}] = Mass{0.0, kNegInf};
  for (int t = 0; t < e.num_frames(); ++t) {
    Beam next;
    for (const auto& [prefix, mass] : current) {
      const double total = mass.total();
      // Stay on the same prefix through a blank.
      {
        Mass& m = next[prefix];
        m.blank = LogAdd(m.blank, total + e(t, kBlankId));
      }
      const TokenId last = prefix.empty() ? kBlankId : prefix.labels.back();
      if (last != kBlankId && mass.nonblank != kNegInf) {
        Mass& m = next[prefix];
        m.nonblank = LogAdd(m.nonblank, mass.nonblank + e(t, last));
      }
      for (TokenId c = 1; c < V; ++c) {
        const double from = c == last ? mass.blank : total;
        const double contrib = from + e(t, c);
        if (contrib == kNegInf) continue;
        Transcript extended = prefix;
        extended.labels.push_back(c);
        Mass& m = next[extended];
        m.nonblank = LogAdd(m.nonblank, contrib);
      }
    }
    prune(next);
    current.swap(next);
  }

  std::vector<ScoredTranscript> out;
  for (const auto& [prefix, mass] : current) out.push_back({prefix, mass.total()});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return out;
}

}  // namespace tastream
