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

#include "tastream/lattice.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tastream/errors.hpp"
#include "tastream/simd/kernels.hpp"

namespace tastream {
namespace {

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r' && s[j] != '\n') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool ParseDouble(std::string_view s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool ParseInt(std::string_view s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void AppendDouble(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocab

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != kBlankToken)
    throw InputError("vocabulary must start with " + std::string(kBlankToken));
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const std::string& tok = tokens_[i];
    if (tok.empty()) throw InputError("empty token at id " + std::to_string(i));
    if (!index_.emplace(tok, static_cast<TokenId>(i)).second)
      throw InputError("duplicate token '" + tok + "'");
    if (tok == kEosToken) {
      if (i + 1 != tokens_.size())
        throw InputError(std::string(kEosToken) + " must be the last vocabulary entry");
      eos_id_ = static_cast<TokenId>(i);
    }
  }
  num_ctc_labels_ = static_cast<int>(tokens_.size()) - (eos_id_ ? 1 : 0);
}

Vocab Vocab::Load(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // Tolerate a trailing blank line only.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw FormatError("empty vocabulary line", lineno);
    }
    tokens.push_back(line);
  }
  try {
    return Vocab(std::move(tokens));
  } catch (const InputError& e) {
    throw FormatError(e.what());
  }
}

Vocab Vocab::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open vocabulary " + path.string());
  return Load(in);
}

Vocab Vocab::Synthetic(int num_tokens, bool with_eos) {
  std::vector<std::string> tokens{std::string(kBlankToken)};
  for (int i = 1; i <= num_tokens; ++i) tokens.push_back("t" + std::to_string(i));
  if (with_eos) tokens.emplace_back(kEosToken);
  return Vocab(std::move(tokens));
}

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw InputError("token id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

std::optional<TokenId> Vocab::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Transcript Vocab::Parse(std::string_view text) const {
  Transcript t;
  for (std::string_view piece : SplitWhitespace(text)) {
    auto id = Find(piece);
    if (!id) throw InputError("unknown token '" + std::string(piece) + "'");
    if (*id == kBlankId || (eos_id_ && *id == *eos_id_))
      throw InputError("transcripts cannot contain '" + std::string(piece) + "'");
    t.labels.push_back(*id);
  }
  return t;
}

std::string Vocab::Render(std::span<const TokenId> ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += token(ids[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// EmissionMatrix

void CheckLogDistribution(std::span<const double> row, std::string_view what,
                          double tolerance) {
  for (double v : row) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw InputError(std::string(what) + ": entries must be finite or -inf");
  }
  const double lse = simd::LogSumExp(row);
  if (!(std::abs(lse) <= tolerance)) {
    std::ostringstream msg;
    msg << what << ": not normalized (logsumexp = " << lse << ")";
    throw InputError(msg.str());
  }
}

EmissionMatrix::EmissionMatrix(int num_frames, int num_labels, std::vector<double> values)
    : num_frames_(num_frames), num_labels_(num_labels), values_(std::move(values)) {
  if (num_frames_ < 1) throw InputError("emission matrix needs at least one frame");
  if (num_labels_ < 1) throw InputError("emission matrix needs at least one label");
  if (values_.size() != static_cast<std::size_t>(num_frames_) * num_labels_)
    throw InputError("emission values do not match " + std::to_string(num_frames_) + "x" +
                     std::to_string(num_labels_));
  for (int t = 0; t < num_frames_; ++t)
    CheckLogDistribution(row(t), "emission row " + std::to_string(t));
}

Transcript Collapse(const FramePath& path, int num_labels) {
  Transcript out;
  TokenId prev = -1;
  for (TokenId id : path.labels) {
    if (id < 0 || id >= num_labels)
      throw InputError("path label " + std::to_string(id) + " outside [0, " +
                       std::to_string(num_labels) + ")");
    if (id != prev && id != kBlankId) out.labels.push_back(id);
    prev = id;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format

EmissionReader::EmissionReader(std::istream& in) : in_(in) {
  std::string line;
  if (!std::getline(in_, line)) throw FormatError("missing CTCPOST header", 1);
  const auto fields = SplitWhitespace(line);
  int version = 0;
  if (fields.size() != 4 || fields[0] != "CTCPOST")
    throw FormatError("header must be 'CTCPOST <version> <T> <num_labels>'", 1);
  if (!ParseInt(fields[1], version) || version != 1)
    throw FormatError("unsupported CTCPOST version '" + std::string(fields[1]) + "'", 1);
  if (!ParseInt(fields[2], num_frames_) || num_frames_ < 1)
    throw FormatError("frame count must be a positive integer", 1);
  if (!ParseInt(fields[3], num_labels_) || num_labels_ < 1)
    throw FormatError("label count must be a positive integer", 1);
}

std::optional<std::vector<double>> EmissionReader::NextRow() {
  if (rows_read_ == num_frames_) return std::nullopt;
  std::string line;
  ++line_;
  if (!std::getline(in_, line))
    throw FormatError("stream ended after " + std::to_string(rows_read_) + " of " +
                          std::to_string(num_frames_) + " rows",
                      line_);
  const auto fields = SplitWhitespace(line);
  if (fields.size() != static_cast<std::size_t>(num_labels_))
    throw FormatError("row " + std::to_string(rows_read_) + " has " +
                          std::to_string(fields.size()) + " values, expected " +
                          std::to_string(num_labels_),
                      line_);
  std::vector<double> row(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (!ParseDouble(fields[i], row[i]))
      throw FormatError("row " + std::to_string(rows_read_) + ": bad value '" +
                            std::string(fields[i]) + "'",
                        line_);
  }
  try {
    CheckLogDistribution(row, "row " + std::to_string(rows_read_));
  } catch (const InputError& e) {
    throw FormatError(e.what(), line_);
  }
  ++rows_read_;
  return row;
}

EmissionMatrix LoadEmissions(std::istream& in) {
  EmissionReader reader(in);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(reader.num_frames()) * reader.num_labels());
  while (auto row = reader.NextRow()) values.insert(values.end(), row->begin(), row->end());
  return EmissionMatrix(reader.num_frames(), reader.num_labels(), std::move(values));
}

EmissionMatrix LoadEmissionsFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open emissions " + path.string());
  return LoadEmissions(in);
}

std::string FormatEmissions(const EmissionMatrix& m) {
  std::string out = "CTCPOST 1 " + std::to_string(m.num_frames()) + " " +
                    std::to_string(m.num_labels()) + "\n";
  for (int t = 0; t < m.num_frames(); ++t) {
    const auto row = m.row(t);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ' ';
      AppendDouble(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

void SaveEmissions(const EmissionMatrix& m, std::ostream& out) {
  out << FormatEmissions(m);
  out.flush();
  if (!out) throw std::runtime_error("failed writing emission matrix");
}

void SaveEmissionsFile(const EmissionMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  SaveEmissions(m, out);
}

// ---------------------------------------------------------------------------
// Latency

void LatencySpec::Validate() const {
  if (!(frame_shift_ms > 0)) throw InputError("frame_shift_ms must be positive");
  if (subsample_factor < 1) throw InputError("subsample_factor must be >= 1");
  if (lookahead_frames < 0) throw InputError("lookahead_frames must be >= 0");
}

double LatencyMs(const LatencySpec& spec) {
  spec.Validate();
  return spec.lookahead_frames * spec.subsample_factor * spec.frame_shift_ms;
}

}  // namespace tastream
