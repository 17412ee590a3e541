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

// Trigger extraction and the frame-synchronous one-pass joint CTC +
// triggered-attention beam search.
//
// The CTC part advances exactly like CtcPrefixBeam. The first time a frame
// t extends a prefix with token y (a trigger event), the attention scorer is
// asked for P(y | prefix, h[0..min(t + delta, T - 1)]) and the result is
// frozen into the new hypothesis. After the final frame every hypothesis
// also scores end-of-sentence with all frames visible. Hypotheses are
// pruned and ranked by
//
//   combined = weight * log_p_att + (1 - weight) * log(P_blank + P_nonblank)
//
// and a zero weight drops its term entirely (so -inf never meets 0).

#pragma once

#include <map>
#include <span>
#include <vector>

#include "tastream/lattice.hpp"

namespace tastream {

// First frame of each token's emitting run in `alignment`.
TriggerSequence ExtractTriggers(const FramePath& alignment);

// An autoregressive attention decoder as seen by the search. Distributions
// have num_tokens() + 1 entries: index j < num_tokens() is token id j + 1,
// the last index is end-of-sentence. frame_limit is the index of the last
// encoded frame the decoder may read. Implementations must be deterministic
// in (prefix, frame_limit).
class AttentionScorer {
 public:
  virtual ~AttentionScorer() = default;

  virtual int num_tokens() const = 0;
  virtual std::vector<double> ScoreNext(const Transcript& prefix, int frame_limit) = 0;
};

inline std::size_t AttentionIndex(TokenId id) { return static_cast<std::size_t>(id - 1); }

struct DecodeConfig {
  double weight = 0.5;        // attention weight lambda in [0, 1]
  int beam = 10;
  int decoder_lookahead = 0;  // delta, in encoder frames

  void Validate() const;
};

// The reference operating point: weight 0.5, beam 10.
DecodeConfig RunConfigDefaults();

struct Hypothesis {
  Transcript prefix;
  double log_p_blank = kNegInf;
  double log_p_nonblank = kNegInf;
  double log_p_att = 0.0;
  double combined = kNegInf;
  // Frame of each token's trigger event, parallel to prefix.
  TriggerSequence triggers;

  double log_p_ctc() const { return LogAdd(log_p_blank, log_p_nonblank); }
};

// Incremental decoder. Rows are pushed as they become available; Step()
// decodes the next frame once its decoder look-ahead window is present (or
// the input has ended). Single-threaded; one instance per utterance.
class TriggeredDecoder {
 public:
  TriggeredDecoder(AttentionScorer& scorer, int num_labels, DecodeConfig config);

  void PushFrame(std::span<const double> row);
  void EndOfInput();

  // Decodes one frame if possible; after the last frame also applies the
  // end-of-sentence scores. False when nothing was ready.
  bool Step();

  bool input_ended() const { return input_ended_; }
  bool done() const { return done_; }
  int frames_received() const { return static_cast<int>(rows_.size() / num_labels_); }
  int frames_decoded() const { return next_frame_; }
  // Frame being decoded while Step() runs; last decoded frame otherwise.
  int current_frame() const { return current_frame_; }
  const DecodeConfig& config() const { return config_; }

  // Ranked best first by combined score, ties by prefix.
  const std::vector<Hypothesis>& beam() const { return beam_; }
  const Hypothesis& best() const { return beam_.front(); }

 private:
  std::span<const double> Row(int t) const;
  double Combine(double att, double ctc) const;
  const std::vector<double>& Score(const Transcript& prefix, int frame_limit);
  void DecodeFrame(int t);
  void Finalize();
  void Rank(bool prune);

  AttentionScorer& scorer_;
  int num_labels_;
  DecodeConfig config_;
  std::vector<double> rows_;
  std::vector<Hypothesis> beam_;
  std::map<Transcript, std::vector<double>> frame_cache_;
  int next_frame_ = 0;
  int current_frame_ = -1;
  bool input_ended_ = false;
  bool done_ = false;
};

// Offline decode of a whole lattice; same search as TriggeredDecoder.
std::vector<Hypothesis> TriggeredDecode(const EmissionMatrix& e, AttentionScorer& scorer,
                                        const DecodeConfig& config);

}  // namespace tastream
