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

// Data-defined scorers that stand in for trained decoders, plus the factory
// that turns a command-line scorer spec into per-utterance scorer sessions.
//
// Scorer table files are JSON:
//
//   {
//     "vocab_size": 8,                      // non-blank tokens
//     "attention": {                        // lookup-table attention scorer
//       "fallback": [...],                  // optional, default uniform
//       "default": [ENTRY, ...],            // shared by every utterance
//       "utterances": {"utt1": [ENTRY, ...]}
//     },
//     "bigram": [[...], ...],               // optional bigram table
//     "cmlm": {"utterances": {"utt1": {"truth": [ids], "confidence": 1.0}}}
//   }
//
// An ENTRY is {"prefix": [ids], "min_frame": k, "logp": [vocab_size + 1]}.
// For a query (prefix, frame_limit) the entry for that prefix with the
// largest min_frame <= frame_limit applies; without one the fallback does.
// Bigram rows are indexed by the previous token (row 0 = sentence start)
// and hold vocab_size + 1 log-probabilities, end-of-sentence last.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tastream/mask_ctc.hpp"
#include "tastream/trigger_decode.hpp"

namespace tastream::harness {

// Uniform over tokens and end-of-sentence.
class UniformAttentionScorer : public AttentionScorer {
 public:
  explicit UniformAttentionScorer(int num_tokens);
  int num_tokens() const override { return num_tokens_; }
  std::vector<double> ScoreNext(const Transcript& prefix, int frame_limit) override;

 private:
  int num_tokens_;
};

class LookupTableAttentionScorer : public AttentionScorer {
 public:
  struct Entry {
    int min_frame = 0;
    std::vector<double> logp;
  };

  // Uniform fallback when `fallback` is empty.
  LookupTableAttentionScorer(int num_tokens, std::vector<double> fallback = {});

  void Add(const Transcript& prefix, int min_frame, std::vector<double> logp);

  int num_tokens() const override { return num_tokens_; }
  std::vector<double> ScoreNext(const Transcript& prefix, int frame_limit) override;

 private:
  int num_tokens_;
  std::vector<double> fallback_;
  // Entries per prefix, sorted by min_frame.
  std::map<Transcript, std::vector<Entry>> table_;
};

class BigramAttentionScorer : public AttentionScorer {
 public:
  // rows: num_tokens + 1 rows (row 0 = start) of num_tokens + 1 entries.
  BigramAttentionScorer(int num_tokens, std::vector<std::vector<double>> rows);
  int num_tokens() const override { return num_tokens_; }
  std::vector<double> ScoreNext(const Transcript& prefix, int frame_limit) override;

 private:
  int num_tokens_;
  std::vector<std::vector<double>> rows_;
};

class UniformCmlmScorer : public CmlmScorer {
 public:
  explicit UniformCmlmScorer(int num_tokens) : num_tokens_(num_tokens) {}
  int num_tokens() const override { return num_tokens_; }
  std::vector<std::vector<double>> Predict(const MaskedTranscript& slots) override;

 private:
  int num_tokens_;
};

// Knows the planted transcript. Puts `confidence` on the true token of each
// masked slot (all of it when confidence is 1) and spreads the rest evenly.
// Slots beyond the truth length get a uniform distribution.
class OracleCmlmScorer : public CmlmScorer {
 public:
  OracleCmlmScorer(int num_tokens, Transcript truth, double confidence = 1.0);
  int num_tokens() const override { return num_tokens_; }
  std::vector<std::vector<double>> Predict(const MaskedTranscript& slots) override;

 private:
  int num_tokens_;
  Transcript truth_;
  double confidence_;
};

// Predicts a masked slot from its left neighbour when that neighbour is
// observed (or the slot is first), using bigram rows without the
// end-of-sentence column; uniform otherwise.
class BigramCmlmScorer : public CmlmScorer {
 public:
  BigramCmlmScorer(int num_tokens, const std::vector<std::vector<double>>& rows);
  int num_tokens() const override { return num_tokens_; }
  std::vector<std::vector<double>> Predict(const MaskedTranscript& slots) override;

 private:
  int num_tokens_;
  std::vector<std::vector<double>> rows_;
};

// Parsed scorer spec. One instance serves a whole corpus; each utterance
// gets fresh scorer sessions.
//   "uniform"        uniform attention and CMLM
//   "table:FILE"     lookup-table attention / oracle CMLM from FILE
//   "bigram:FILE"    bigram attention and CMLM from FILE
//   "exec:CMD"       remote scorer speaking the bridge protocol
class ScorerFactory {
 public:
  static ScorerFactory FromSpec(const std::string& spec, int num_tokens);
  static ScorerFactory FromTableJson(const nlohmann::json& doc, int num_tokens,
                                     bool prefer_bigram = false);

  std::unique_ptr<AttentionScorer> Attention(const std::string& utt_id) const;
  std::unique_ptr<CmlmScorer> Cmlm(const std::string& utt_id) const;

  int num_tokens() const { return num_tokens_; }
  const std::string& kind() const { return kind_; }

 private:
  enum class Kind { kUniform, kTable, kBigram, kExec };

  ScorerFactory() = default;

  Kind kind_id_ = Kind::kUniform;
  std::string kind_ = "uniform";
  int num_tokens_ = 0;
  std::string command_;
  std::vector<double> fallback_;
  std::vector<std::pair<Transcript, LookupTableAttentionScorer::Entry>> shared_entries_;
  std::map<std::string, std::vector<std::pair<Transcript, LookupTableAttentionScorer::Entry>>>
      utt_entries_;
  std::vector<std::vector<double>> bigram_;
  std::map<std::string, std::pair<Transcript, double>> cmlm_truth_;
};

nlohmann::json LoadJsonFile(const std::filesystem::path& path);

// Log-probability vectors in JSON: -inf is written as null and read back
// from null or the string "-inf".
std::vector<double> LogVectorFromJson(const nlohmann::json& v);
nlohmann::json LogVectorToJson(const std::vector<double>& v);

}  // namespace tastream::harness
