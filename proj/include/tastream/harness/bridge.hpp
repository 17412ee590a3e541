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

// Client side of the scorer bridge: a child process speaking line-delimited
// JSON over its stdin/stdout.
//
//   -> {"id":0,"op":"hello","vocab_size":n}             <- {"ok":true}
//   -> {"id":k,"op":"score_next","prefix":[...],"frame_limit":t}
//                                                       <- {"id":k,"logp":[n + 1]}
//   -> {"id":k,"op":"cmlm_predict","slots":[ids, -1 = mask]}
//                                                       <- {"logp":[[n] per mask]}
//
// Every request carries an id. A response that carries an id must echo it.
// One request is in flight at a time. The child sees the utterance id in
// the TASTREAM_UTT environment variable.

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tastream/mask_ctc.hpp"
#include "tastream/trigger_decode.hpp"

namespace tastream::harness {

class BridgeSession {
 public:
  static constexpr std::chrono::milliseconds kDefaultTimeout{10000};

  // Spawns `/bin/sh -c command` and performs the hello handshake.
  BridgeSession(const std::string& command, int vocab_size, const std::string& utt_id = {},
                std::chrono::milliseconds timeout = kDefaultTimeout);
  ~BridgeSession();

  BridgeSession(const BridgeSession&) = delete;
  BridgeSession& operator=(const BridgeSession&) = delete;

  // Sends `request` with a fresh id and returns the parsed response.
  // Throws ScorerError on I/O failure, timeout, unparsable JSON, id mismatch
  // or an error response; the raw line is attached when there is one.
  nlohmann::json Call(nlohmann::json request);

  int vocab_size() const { return vocab_size_; }
  std::uint64_t requests() const { return next_id_; }

 private:
  void Close();
  std::string ReadLine();
  void WriteLine(const std::string& line);

  int fd_ = -1;
  int pid_ = -1;
  int vocab_size_;
  std::chrono::milliseconds timeout_;
  std::uint64_t next_id_ = 0;
  std::string buffer_;
};

class BridgeAttentionScorer : public AttentionScorer {
 public:
  explicit BridgeAttentionScorer(std::shared_ptr<BridgeSession> session);
  int num_tokens() const override { return session_->vocab_size(); }
  std::vector<double> ScoreNext(const Transcript& prefix, int frame_limit) override;

 private:
  std::shared_ptr<BridgeSession> session_;
};

class BridgeCmlmScorer : public CmlmScorer {
 public:
  explicit BridgeCmlmScorer(std::shared_ptr<BridgeSession> session);
  int num_tokens() const override { return session_->vocab_size(); }
  std::vector<std::vector<double>> Predict(const MaskedTranscript& slots) override;

 private:
  std::shared_ptr<BridgeSession> session_;
};

}  // namespace tastream::harness
