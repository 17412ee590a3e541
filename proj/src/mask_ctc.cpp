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

#include "tastream/mask_ctc.hpp"

#include <string>

#include "tastream/errors.hpp"
#include "tastream/simd/kernels.hpp"

namespace tastream {

std::vector<int> MaskedTranscript::masked_positions() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i] == kMaskSlot) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> MaskedTranscript::observed_positions() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i] != kMaskSlot) out.push_back(static_cast<int>(i));
  return out;
}

MaskedTranscript MaskLowConfidence(const GreedyResult& greedy, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InputError("threshold must be in [0, 1]");
  if (greedy.confidences.size() != greedy.transcript.size())
    throw InputError("confidences do not match transcript length");
  MaskedTranscript out;
  out.slots = greedy.transcript.labels;
  for (std::size_t l = 0; l < out.slots.size(); ++l)
    if (greedy.confidences[l] < threshold) out.slots[l] = kMaskSlot;
  return out;
}

namespace {

std::vector<std::vector<double>> CheckedPredict(CmlmScorer& scorer, const MaskedTranscript& m,
                                                std::size_t num_masked) {
  std::vector<std::vector<double>> preds;
  try {
    preds = scorer.Predict(m);
  } catch (const ScorerError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScorerError(std::string("cmlm scorer failed: ") + e.what());
  }
  if (preds.size() != num_masked)
    throw ScorerError("cmlm returned " + std::to_string(preds.size()) +
                      " distributions for " + std::to_string(num_masked) + " masks");
  for (const auto& p : preds) {
    if (p.size() != static_cast<std::size_t>(scorer.num_tokens()))
      throw ScorerError("cmlm distribution has " + std::to_string(p.size()) +
                        " entries, expected " + std::to_string(scorer.num_tokens()));
    try {
      CheckLogDistribution(p, "cmlm distribution");
    } catch (const InputError& e) {
      throw ScorerError(e.what());
    }
  }
  return preds;
}

}  // namespace

Transcript CmlmFill(const MaskedTranscript& masked, CmlmScorer& scorer, int max_iterations,
                    FillSchedule schedule) {
  if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
  for (TokenId id : masked.slots)
    if (id != kMaskSlot && (id <= kBlankId || id > scorer.num_tokens()))
      throw InputError("observed slot " + std::to_string(id) + " is not a token id");

  MaskedTranscript m = masked;
  for (int round = 1; round <= max_iterations; ++round) {
    const std::vector<int> masks = m.masked_positions();
    if (masks.empty()) break;
    const auto preds = CheckedPredict(scorer, m, masks.size());
    const bool commit_all = schedule == FillSchedule::kParallel || round == max_iterations;
    if (commit_all) {
      for (std::size_t i = 0; i < masks.size(); ++i)
        m.slots[masks[i]] = static_cast<TokenId>(simd::ArgMax(preds[i])) + 1;
      break;
    }
    std::size_t best_slot = 0, best_token = simd::ArgMax(preds[0]);
    for (std::size_t i = 1; i < masks.size(); ++i) {
      const std::size_t tok = simd::ArgMax(preds[i]);
      if (preds[i][tok] > preds[best_slot][best_token]) {
        best_slot = i;
        best_token = tok;
      }
    }
    m.slots[masks[best_slot]] = static_cast<TokenId>(best_token) + 1;
  }
  return Transcript{m.slots};
}

Transcript MaskCtcDecode(const EmissionMatrix& e, CmlmScorer& scorer,
                         const MaskCtcConfig& config) {
  if (scorer.num_tokens() != e.num_labels() - 1)
    throw InputError("cmlm covers " + std::to_string(scorer.num_tokens()) +
                     " tokens, lattice has " + std::to_string(e.num_labels() - 1));
  const GreedyResult greedy = CtcGreedy(e, config.confidence);
  const MaskedTranscript masked = MaskLowConfidence(greedy, config.threshold);
  return CmlmFill(masked, scorer, config.max_iterations, config.schedule);
}

}  // namespace tastream
