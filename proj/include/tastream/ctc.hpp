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

// CTC dynamic programming over an emission lattice: forward likelihood,
// best-path decoding with per-token confidence, forced (Viterbi) alignment
// and CTC-only prefix beam search. Everything runs in the log domain.

#pragma once

#include <vector>

#include "tastream/lattice.hpp"

namespace tastream {

enum class ConfidenceRule {
  kRunMax,   // largest posterior over the token's argmax run
  kRunMean,  // mean posterior over the run
};

struct GreedyResult {
  Transcript transcript;
  std::vector<double> confidences;  // one per token, in (0, 1]
  FramePath argmax_path;
};

struct ForcedAlignment {
  FramePath path;
  double log_prob = kNegInf;
  TriggerSequence triggers;
};

struct ScoredTranscript {
  Transcript transcript;
  double score = kNegInf;

  bool operator==(const ScoredTranscript&) const = default;
};

// Frames needed to emit `y`: one per token plus a blank between each pair of
// equal neighbours.
int MinFramesFor(const Transcript& y);

// log sum over all paths p with Collapse(p) == y of prod_t E[t, p_t].
// Returns -inf for transcripts that no path of length T can produce.
double CtcLogProb(const EmissionMatrix& e, const Transcript& y);

// Best-path decoding. Argmax ties go to the lowest label id.
GreedyResult CtcGreedy(const EmissionMatrix& e,
                       ConfidenceRule rule = ConfidenceRule::kRunMax);

// Most probable path collapsing to y. Throws InfeasibleAlignment when no
// such path has nonzero probability. Ties prefer a blank state, then the
// lower extended-state index.
ForcedAlignment CtcViterbi(const EmissionMatrix& e, const Transcript& y);

// Frame-synchronous prefix beam search keeping the top `beam` prefixes by
// log(P_blank + P_nonblank) after every frame. Result is ranked best first;
// equal scores order by prefix, lexicographically.
std::vector<ScoredTranscript> CtcPrefixBeam(const EmissionMatrix& e, int beam);

}  // namespace tastream
