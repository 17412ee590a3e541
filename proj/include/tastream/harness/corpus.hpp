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

// Corpus files and the encoder look-ahead sweep.
//
// Emission list: one "<utt-id> <path>" per line; relative paths resolve
// against the list's directory. Transcript tables: "<utt-id> tok tok ..."
// per line, or the decoder's "<utt-id>\t<tokens>\t<score>" output.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tastream/harness/eval.hpp"
#include "tastream/harness/scorers.hpp"
#include "tastream/lattice.hpp"

namespace tastream::harness {

struct TranscriptLine {
  std::string id;
  std::vector<std::string> tokens;
};

std::vector<std::pair<std::string, std::filesystem::path>> ReadEmissionList(
    const std::filesystem::path& list);
std::vector<TranscriptLine> ReadTranscriptTable(std::istream& in);
std::vector<TranscriptLine> ReadTranscriptTableFile(const std::filesystem::path& path);

struct CorpusUtterance {
  std::string id;
  EmissionMatrix emissions;
  Transcript reference;
};

// Every listed utterance must have a reference line.
std::vector<CorpusUtterance> LoadCorpus(const std::filesystem::path& list,
                                        const std::filesystem::path& refs, const Vocab& vocab);

struct SweepConfig {
  double frame_shift_ms = 10.0;
  int subsample_factor = 4;
  std::optional<int> delta;  // decoder look-ahead; defaults to each span
  double weight = 0.5;
  int beam = 10;
};

struct SweepRow {
  int span = 0;
  double latency_ms = 0.0;
  EvalReport report;
};

// One joint triggered decode of the corpus per encoder look-ahead span.
std::vector<SweepRow> SweepLatency(const std::vector<CorpusUtterance>& corpus,
                                   std::span<const int> spans, const SweepConfig& config,
                                   const ScorerFactory& scorers);

// Tab-separated, header first:
// span latency_ms ter mean_utt_ter sub ins del ref_tokens
void WriteSweepTable(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace tastream::harness
