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

#include "tastream/harness/stream.hpp"

#include <algorithm>

#include "tastream/errors.hpp"

namespace tastream::harness {

std::optional<std::vector<double>> MatrixFrameSource::Next() {
  if (t_ == m_.num_frames()) return std::nullopt;
  const auto row = m_.row(t_++);
  return std::vector<double>(row.begin(), row.end());
}

DecodeConfig StreamConfig::decode_config() const {
  return DecodeConfig{weight, beam, delta.value_or(latency.lookahead_frames)};
}

namespace {

bool HasPrefix(const Transcript& t, const Transcript& prefix, std::size_t len) {
  return t.size() >= len && std::equal(prefix.labels.begin(), prefix.labels.begin() + len,
                                       t.labels.begin());
}

}  // namespace

StreamResult StreamDecode(FrameSource& source, AttentionScorer& scorer,
                          const StreamConfig& config) {
  config.latency.Validate();
  if (config.chunk_frames < 1) throw InputError("chunk_frames must be >= 1");
  const DecodeConfig dc = config.decode_config();
  const int encoder_lookahead = config.latency.lookahead_frames;
  const double frame_ms = config.latency.encoder_frame_ms();

  TriggeredDecoder decoder(scorer, source.num_labels(), dc);
  StreamResult result;
  result.encoder_latency_ms = LatencyMs(config.latency);

  // Input frame at which the decision for frame t is taken.
  auto issue_frame = [&](int t) {
    return std::max(t + dc.decoder_lookahead, decoder.frames_received() - 1) + encoder_lookahead;
  };
  auto emit = [&](EventKind kind, const Transcript& t, int frame, std::string diag = {}) {
    result.events.push_back(StreamEvent{kind, t, frame, frame * frame_ms, std::move(diag)});
  };
  // Partials are emitted when the best transcript changes, starting from
  // the empty one.
  Transcript last_partial;
  auto drain = [&] {
    while (!decoder.done()) {
      const int t = decoder.frames_decoded();
      const bool finalizing = decoder.input_ended() && t == decoder.frames_received();
      if (!decoder.Step()) break;
      if (finalizing) break;
      const Transcript& best = decoder.best().prefix;
      if (last_partial != best) {
        emit(EventKind::kPartial, best, issue_frame(t));
        last_partial = best;
      }
    }
  };

  std::string diagnostic;
  try {
    bool more = true;
    while (more) {
      for (int i = 0; i < config.chunk_frames; ++i) {
        auto row = source.Next();
        if (!row) {
          more = false;
          break;
        }
        decoder.PushFrame(*row);
      }
      drain();
    }
  } catch (const ScorerError&) {
    throw;
  } catch (const std::exception& e) {
    diagnostic = std::string("interrupted: ") + e.what();
    result.interrupted = true;
  }

  decoder.EndOfInput();
  const int received = decoder.frames_received();
  if (received == 0) {
    emit(EventKind::kFinal, Transcript{}, encoder_lookahead,
         diagnostic.empty() ? "no frames received" : diagnostic);
    result.interrupted = true;
    return result;
  }
  drain();

  result.final_hypothesis = decoder.best();
  const int final_frame = received - 1 + dc.decoder_lookahead + encoder_lookahead;
  emit(EventKind::kFinal, result.final_hypothesis.prefix, final_frame, diagnostic);

  const Transcript& final_t = result.final_hypothesis.prefix;
  for (std::size_t l = 0; l < final_t.size(); ++l) {
    // Earliest event after which every event keeps tokens 0..l.
    std::size_t first = result.events.size() - 1;
    for (std::size_t e = result.events.size(); e-- > 0;) {
      if (!HasPrefix(result.events[e].transcript, final_t, l + 1)) break;
      first = e;
    }
    const int trigger = result.final_hypothesis.triggers.frames[l];
    result.token_latency_ms.push_back((result.events[first].frame_issued - trigger) * frame_ms);
  }
  return result;
}

}  // namespace tastream::harness
