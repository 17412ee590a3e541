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

#include "tastream/trigger_decode.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "tastream/errors.hpp"

namespace tastream {

TriggerSequence ExtractTriggers(const FramePath& alignment) {
  TriggerSequence out;
  TokenId prev = kBlankId;
  for (std::size_t t = 0; t < alignment.labels.size(); ++t) {
    const TokenId id = alignment.labels[t];
    if (id < 0) throw InputError("negative label in alignment");
    if (id != kBlankId && id != prev) out.frames.push_back(static_cast<int>(t));
    prev = id;
  }
  return out;
}

void DecodeConfig::Validate() const {
  if (!(weight >= 0.0 && weight <= 1.0)) throw InputError("attention weight must be in [0, 1]");
  if (beam < 1) throw InputError("beam must be >= 1");
  if (decoder_lookahead < 0) throw InputError("decoder look-ahead must be >= 0");
}

DecodeConfig RunConfigDefaults() { return DecodeConfig{0.5, 10, 0}; }

TriggeredDecoder::TriggeredDecoder(AttentionScorer& scorer, int num_labels, DecodeConfig config)
    : scorer_(scorer), num_labels_(num_labels), config_(config) {
  config_.Validate();
  if (num_labels_ < 1) throw InputError("need at least the blank label");
  if (scorer_.num_tokens() != num_labels_ - 1)
    throw InputError("scorer covers " + std::to_string(scorer_.num_tokens()) +
                     " tokens, lattice has " + std::to_string(num_labels_ - 1));
  Hypothesis root;
  root.log_p_blank = 0.0;
  beam_.push_back(root);
  Rank(false);
}

std::span<const double> TriggeredDecoder::Row(int t) const {
  return {rows_.data() + static_cast<std::size_t>(t) * num_labels_,
          static_cast<std::size_t>(num_labels_)};
}

void TriggeredDecoder::PushFrame(std::span<const double> row) {
  if (input_ended_) throw InputError("frame pushed after end of input");
  if (row.size() != static_cast<std::size_t>(num_labels_))
    throw InputError("row has " + std::to_string(row.size()) + " labels, expected " +
                     std::to_string(num_labels_));
  CheckLogDistribution(row, "emission row " + std::to_string(frames_received()));
  rows_.insert(rows_.end(), row.begin(), row.end());
}

void TriggeredDecoder::EndOfInput() { input_ended_ = true; }

bool TriggeredDecoder::Step() {
  if (done_) return false;
  const int received = frames_received();
  if (next_frame_ < received &&
      (input_ended_ || next_frame_ + config_.decoder_lookahead < received)) {
    current_frame_ = next_frame_;
    DecodeFrame(next_frame_);
    ++next_frame_;
    return true;
  }
  if (input_ended_ && next_frame_ == received) {
    if (received == 0) throw InputError("no frames to decode");
    Finalize();
    done_ = true;
    return true;
  }
  return false;
}

double TriggeredDecoder::Combine(double att, double ctc) const {
  if (config_.weight == 0.0) return ctc;
  if (config_.weight == 1.0) return att;
  return config_.weight * att + (1.0 - config_.weight) * ctc;
}

const std::vector<double>& TriggeredDecoder::Score(const Transcript& prefix, int frame_limit) {
  auto it = frame_cache_.find(prefix);
  if (it != frame_cache_.end()) return it->second;

  auto describe = [&] {
    std::ostringstream os;
    os << "prefix=[";
    for (std::size_t i = 0; i < prefix.size(); ++i) os << (i ? " " : "") << prefix.labels[i];
    os << "] frame_limit=" << frame_limit;
    return os.str();
  };
  std::vector<double> dist;
  try {
    dist = scorer_.ScoreNext(prefix, frame_limit);
  } catch (const ScorerError& e) {
    throw ScorerError(e.what(), describe());
  } catch (const std::exception& e) {
    throw ScorerError(std::string("attention scorer failed: ") + e.what(), describe());
  }
  if (dist.size() != static_cast<std::size_t>(num_labels_))
    throw ScorerError("attention distribution has " + std::to_string(dist.size()) +
                          " entries, expected " + std::to_string(num_labels_),
                      describe());
  try {
    CheckLogDistribution(dist, "attention distribution");
  } catch (const InputError& e) {
    throw ScorerError(e.what(), describe());
  }
  return frame_cache_.emplace(prefix, std::move(dist)).first->second;
}

void TriggeredDecoder::DecodeFrame(int t) {
  const int received = frames_received();
  const int frame_limit = std::min(t + config_.decoder_lookahead, received - 1);
  const auto row = Row(t);
  const bool use_attention = config_.weight > 0.0;
  frame_cache_.clear();

  std::map<Transcript, Hypothesis> next;
  for (const Hypothesis& h : beam_) {
    Hypothesis carried = h;
    carried.log_p_blank = carried.log_p_nonblank = kNegInf;
    next.emplace(h.prefix, std::move(carried));
  }
  for (const Hypothesis& h : beam_) {
    const double total = h.log_p_ctc();
    Hypothesis& same = next.at(h.prefix);
    same.log_p_blank = LogAdd(same.log_p_blank, total + row[kBlankId]);
    const TokenId last = h.prefix.empty() ? kBlankId : h.prefix.labels.back();
    if (last != kBlankId && h.log_p_nonblank != kNegInf)
      same.log_p_nonblank = LogAdd(same.log_p_nonblank, h.log_p_nonblank + row[last]);

    for (TokenId c = 1; c < num_labels_; ++c) {
      const double from = c == last ? h.log_p_blank : total;
      const double contrib = from + row[c];
      if (contrib == kNegInf) continue;
      Transcript extended = h.prefix;
      extended.labels.push_back(c);
      auto it = next.find(extended);
      if (it == next.end()) {
        Hypothesis fresh;
        fresh.prefix = extended;
        fresh.log_p_att = h.log_p_att;
        if (use_attention) fresh.log_p_att += Score(h.prefix, frame_limit)[AttentionIndex(c)];
        fresh.triggers = h.triggers;
        fresh.triggers.frames.push_back(t);
        it = next.emplace(std::move(extended), std::move(fresh)).first;
      }
      it->second.log_p_nonblank = LogAdd(it->second.log_p_nonblank, contrib);
    }
  }

  beam_.clear();
  for (auto& [prefix, h] : next)
    if (h.log_p_ctc() != kNegInf) beam_.push_back(std::move(h));
  Rank(true);
}

void TriggeredDecoder::Finalize() {
  const int last_frame = frames_received() - 1;
  current_frame_ = last_frame;
  frame_cache_.clear();
  if (config_.weight > 0.0) {
    const std::size_t eos = static_cast<std::size_t>(num_labels_ - 1);
    for (Hypothesis& h : beam_) h.log_p_att += Score(h.prefix, last_frame)[eos];
  }
  Rank(false);
}

void TriggeredDecoder::Rank(bool prune) {
  for (Hypothesis& h : beam_) h.combined = Combine(h.log_p_att, h.log_p_ctc());
  std::sort(beam_.begin(), beam_.end(), [](const Hypothesis& a, const Hypothesis& b) {
    if (a.combined != b.combined) return a.combined > b.combined;
    return a.prefix < b.prefix;
  });
  if (prune && beam_.size() > static_cast<std::size_t>(config_.beam)) beam_.resize(config_.beam);
}

std::vector<Hypothesis> TriggeredDecode(const EmissionMatrix& e, AttentionScorer& scorer,
                                        const DecodeConfig& config) {
  TriggeredDecoder decoder(scorer, e.num_labels(), config);
  for (int t = 0; t < e.num_frames(); ++t) decoder.PushFrame(e.row(t));
  decoder.EndOfInput();
  while (decoder.Step()) {
  }
  return decoder.beam();
}

}  // namespace tastream
