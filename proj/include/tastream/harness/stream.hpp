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

// Streaming simulation on top of TriggeredDecoder, in simulated time.
//
// Encoder output row f becomes available at input frame f + L, where L is
// the encoder look-ahead, because the encoder needs L future frames. Frame
// t is decoded once rows up to t + delta exist, so its partial result is
// issued at input frame t + delta + L. At end of input the remaining
// frames keep that schedule. Times are reported in encoder frames and in
// milliseconds (one encoder frame = subsample_factor * frame_shift_ms).

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tastream/lattice.hpp"
#include "tastream/trigger_decode.hpp"

namespace tastream::harness {

enum class EventKind { kPartial, kFinal };

struct StreamEvent {
  EventKind kind = EventKind::kPartial;
  Transcript transcript;
  int frame_issued = 0;
  double wallclock_simulated_ms = 0.0;
  // Final event only: empty on success, otherwise why the stream stopped.
  std::string diagnostic;
};

// Yields emission rows in order. Returns nullopt at end of input; throws
// when the source breaks off.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual int num_labels() const = 0;
  virtual std::optional<std::vector<double>> Next() = 0;
};

class MatrixFrameSource : public FrameSource {
 public:
  explicit MatrixFrameSource(const EmissionMatrix& m) : m_(m) {}
  int num_labels() const override { return m_.num_labels(); }
  std::optional<std::vector<double>> Next() override;

 private:
  const EmissionMatrix& m_;
  int t_ = 0;
};

// Rows straight off a CTCPOST text stream; a truncated stream throws.
class ReaderFrameSource : public FrameSource {
 public:
  explicit ReaderFrameSource(std::istream& in) : reader_(in) {}
  int num_labels() const override { return reader_.num_labels(); }
  std::optional<std::vector<double>> Next() override { return reader_.NextRow(); }

 private:
  EmissionReader reader_;
};

struct StreamConfig {
  LatencySpec latency;        // lookahead_frames is the encoder look-ahead
  std::optional<int> delta;   // decoder look-ahead; defaults to the encoder's
  double weight = 0.5;
  int beam = 10;
  int chunk_frames = 1;       // rows handed over per arrival

  DecodeConfig decode_config() const;
};

struct StreamResult {
  std::vector<StreamEvent> events;
  Hypothesis final_hypothesis;
  double encoder_latency_ms = 0.0;
  // Per token of the final transcript: (first stable issue - trigger) in ms.
  std::vector<double> token_latency_ms;
  bool interrupted = false;
};

StreamResult StreamDecode(FrameSource& source, AttentionScorer& scorer,
                          const StreamConfig& config);

}  // namespace tastream::harness
