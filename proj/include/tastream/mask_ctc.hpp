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

// Two-pass Mask-CTC inference: best-path CTC output, masking of tokens
// whose confidence falls below a threshold, and iterative refill of the
// masked slots by a conditional masked language model. The slot count is
// fixed by the first pass, so only substitutions can be repaired.

#pragma once

#include <vector>

#include "tastream/ctc.hpp"
#include "tastream/lattice.hpp"

namespace tastream {

inline constexpr TokenId kMaskSlot = -1;

struct MaskedTranscript {
  // Observed token id, or kMaskSlot.
  std::vector<TokenId> slots;

  std::size_t size() const { return slots.size(); }
  bool is_masked(std::size_t i) const { return slots[i] == kMaskSlot; }
  std::vector<int> masked_positions() const;
  std::vector<int> observed_positions() const;
  bool operator==(const MaskedTranscript&) const = default;
};

// Conditional masked LM. Predict returns one log-distribution per masked
// slot, in increasing slot order, each of num_tokens() entries where index
// j is token id j + 1. Must be deterministic in its input.
class CmlmScorer {
 public:
  virtual ~CmlmScorer() = default;

  virtual int num_tokens() const = 0;
  virtual std::vector<std::vector<double>> Predict(const MaskedTranscript& slots) = 0;
};

enum class FillSchedule {
  kEasyFirst,  // commit the single most confident prediction per round
  kParallel,   // commit every argmax in one round
};

struct MaskCtcConfig {
  double threshold = 0.9;
  int max_iterations = 10;
  FillSchedule schedule = FillSchedule::kEasyFirst;
  ConfidenceRule confidence = ConfidenceRule::kRunMax;
};

// Slot l is masked iff confidences[l] < threshold.
MaskedTranscript MaskLowConfidence(const GreedyResult& greedy, double threshold);

// Easy-first refill: each round predicts every remaining mask and commits
// the highest-probability (slot, token) pair, ties to the leftmost slot and
// then the lowest token id. The last permitted round commits every
// remaining argmax. Observed slots are never changed.
Transcript CmlmFill(const MaskedTranscript& masked, CmlmScorer& scorer, int max_iterations,
                    FillSchedule schedule = FillSchedule::kEasyFirst);

Transcript MaskCtcDecode(const EmissionMatrix& e, CmlmScorer& scorer,
                         const MaskCtcConfig& config = {});

}  // namespace tastream
