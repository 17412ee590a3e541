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

// Core domain types shared by every decoder: vocabulary, the CTC emission
// lattice, transcripts and frame paths, the collapse function, the text
// lattice format, and encoder latency arithmetic.

#pragma once

#include <cmath>
#include <compare>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tastream {

using TokenId = int;

inline constexpr TokenId kBlankId = 0;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)); -inf when both are -inf.
inline double LogAdd(double a, double b);

// A label sequence without blanks.
struct Transcript {
  std::vector<TokenId> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  auto operator<=>(const Transcript&) const = default;
};

// One label (blank included) per emission frame.
struct FramePath {
  std::vector<TokenId> labels;

  std::size_t size() const { return labels.size(); }
  auto operator<=>(const FramePath&) const = default;
};

// Frame index at which each output token fires, one per token, strictly
// increasing and below T.
struct TriggerSequence {
  std::vector<int> frames;

  std::size_t size() const { return frames.size(); }
  bool operator==(const TriggerSequence&) const = default;
};

// Token inventory. Id 0 is always "<blank>". An "<eos>" entry, if present,
// is the last id and is not a CTC label.
class Vocab {
 public:
  static constexpr std::string_view kBlankToken = "<blank>";
  static constexpr std::string_view kEosToken = "<eos>";

  explicit Vocab(std::vector<std::string> tokens);

  // One token per line; line number (0-based) is the id.
  static Vocab Load(std::istream& in);
  static Vocab LoadFile(const std::filesystem::path& path);

  // Builds {"<blank>", "t1", ..., "tn"} for tests and generated corpora.
  static Vocab Synthetic(int num_tokens, bool with_eos = false);

  std::size_t size() const { return tokens_.size(); }
  // Blank plus every non-blank CTC token; the emission matrix width.
  int num_ctc_labels() const { return num_ctc_labels_; }
  std::optional<TokenId> eos_id() const { return eos_id_; }

  const std::string& token(TokenId id) const;
  std::optional<TokenId> Find(std::string_view token) const;

  // Whitespace-separated token strings into a transcript; unknown tokens,
  // blank and eos are input errors.
  Transcript Parse(std::string_view text) const;
  std::string Render(std::span<const TokenId> ids) const;
  std::string Render(const Transcript& t) const { return Render(t.labels); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::optional<TokenId> eos_id_;
  int num_ctc_labels_ = 0;
};

// T x num_labels log-posteriors, column 0 is blank. Rows are normalized
// distributions; entries are finite or -inf. Immutable once built.
class EmissionMatrix {
 public:
  // Maximum |logsumexp(row)| accepted as normalized.
  static constexpr double kRowTolerance = 1e-6;

  EmissionMatrix(int num_frames, int num_labels, std::vector<double> values);

  int num_frames() const { return num_frames_; }
  int num_labels() const { return num_labels_; }

  std::span<const double> row(int t) const {
    return {values_.data() + static_cast<std::size_t>(t) * num_labels_,
            static_cast<std::size_t>(num_labels_)};
  }
  double operator()(int t, TokenId label) const {
    return values_[static_cast<std::size_t>(t) * num_labels_ + label];
  }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const EmissionMatrix&) const = default;

 private:
  int num_frames_;
  int num_labels_;
  std::vector<double> values_;
};

// Throws InputError (with `what` context) unless every entry of `row` is
// finite or -inf and the row log-normalizes to within kRowTolerance.
void CheckLogDistribution(std::span<const double> row, std::string_view what,
                          double tolerance = EmissionMatrix::kRowTolerance);

// Merge consecutive duplicates, then drop blanks. Ids must lie in
// [0, num_labels).
Transcript Collapse(const FramePath& path, int num_labels);

// Reads the "CTCPOST <version> <T> <num_labels>" text format one row at a
// time, so streaming consumers can start before the whole file arrives.
class EmissionReader {
 public:
  explicit EmissionReader(std::istream& in);

  int num_frames() const { return num_frames_; }
  int num_labels() const { return num_labels_; }
  int rows_read() const { return rows_read_; }

  // Next validated row, or nullopt after the declared T rows. A stream that
  // ends early or a malformed row is a FormatError naming the line.
  std::optional<std::vector<double>> NextRow();

 private:
  std::istream& in_;
  int num_frames_ = 0;
  int num_labels_ = 0;
  int rows_read_ = 0;
  int line_ = 1;
};

EmissionMatrix LoadEmissions(std::istream& in);
EmissionMatrix LoadEmissionsFile(const std::filesystem::path& path);

// Canonical form: shortest round-trip decimal for each value, "-inf" for
// negative infinity, one space between values, "\n" after every line.
void SaveEmissions(const EmissionMatrix& m, std::ostream& out);
void SaveEmissionsFile(const EmissionMatrix& m, const std::filesystem::path& path);
std::string FormatEmissions(const EmissionMatrix& m);

// Encoder look-ahead expressed in time. An encoder frame spans
// subsample_factor acoustic frames of frame_shift_ms each.
struct LatencySpec {
  double frame_shift_ms = 10.0;
  int subsample_factor = 4;
  int lookahead_frames = 0;

  void Validate() const;
  double encoder_frame_ms() const { return frame_shift_ms * subsample_factor; }
};

double LatencyMs(const LatencySpec& spec);

inline double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace tastream
