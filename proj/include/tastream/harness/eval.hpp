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

// Token error rate by unit-cost Levenshtein alignment.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tastream/lattice.hpp"

namespace tastream::harness {

struct EditCounts {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int ref_tokens = 0;

  int errors() const { return substitutions + insertions + deletions; }
};

// Minimum-edit alignment. Among optimal alignments the backtrace prefers a
// match or substitution, then a deletion, then an insertion.
EditCounts AlignCounts(const Transcript& ref, const Transcript& hyp);

struct UtteranceEval {
  std::string id;
  EditCounts counts;
  double ter = 0.0;  // percent; an empty reference scores 0 or 100
};

struct EvalReport {
  double token_error_rate = 0.0;  // 100 * (S + I + D) / reference tokens
  double mean_utterance_ter = 0.0;
  EditCounts totals;
  std::vector<UtteranceEval> per_utterance;
};

// refs and hyps pair up by position; ids may be empty.
EvalReport Evaluate(const std::vector<Transcript>& refs, const std::vector<Transcript>& hyps,
                    const std::vector<std::string>& ids = {});

// "%TER 33.33 [ 1 / 3, 0 ins, 1 del, 0 sub ]"
std::string FormatSummary(const EvalReport& report);

}  // namespace tastream::harness
