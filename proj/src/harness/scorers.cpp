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

#include "tastream/harness/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tastream/errors.hpp"
#include "tastream/harness/bridge.hpp"
#include "tastream/simd/kernels.hpp"

namespace tastream::harness {
namespace {

std::vector<double> Uniform(int n) {
  return std::vector<double>(static_cast<std::size_t>(n), -std::log(static_cast<double>(n)));
}

void CheckRow(const std::vector<double>& row, std::size_t expected, const std::string& what) {
  if (row.size() != expected)
    throw InputError(what + " has " + std::to_string(row.size()) + " entries, expected " +
                     std::to_string(expected));
  CheckLogDistribution(row, what);
}

Transcript ParseIds(const nlohmann::json& v) {
  Transcript t;
  for (const auto& x : v) t.labels.push_back(x.get<TokenId>());
  return t;
}

}  // namespace

nlohmann::json LoadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<double> LogVectorFromJson(const nlohmann::json& v) {
  if (!v.is_array()) throw FormatError("expected an array of log-probabilities");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (x.is_null() || (x.is_string() && x.get<std::string>() == "-inf"))
      out.push_back(kNegInf);
    else if (x.is_number())
      out.push_back(x.get<double>());
    else
      throw FormatError("non-numeric log-probability " + x.dump());
  }
  return out;
}

nlohmann::json LogVectorToJson(const std::vector<double>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) {
    if (x == kNegInf)
      out.push_back(nullptr);
    else
      out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------------------

UniformAttentionScorer::UniformAttentionScorer(int num_tokens) : num_tokens_(num_tokens) {
  if (num_tokens_ < 1) throw InputError("scorer needs at least one token");
}

std::vector<double> UniformAttentionScorer::ScoreNext(const Transcript&, int) {
  return Uniform(num_tokens_ + 1);
}

LookupTableAttentionScorer::LookupTableAttentionScorer(int num_tokens, std::vector<double> fallback)
    : num_tokens_(num_tokens), fallback_(std::move(fallback)) {
  if (num_tokens_ < 1) throw InputError("scorer needs at least one token");
  if (fallback_.empty())
    fallback_ = Uniform(num_tokens_ + 1);
  else
    CheckRow(fallback_, num_tokens_ + 1, "fallback distribution");
}

void LookupTableAttentionScorer::Add(const Transcript& prefix, int min_frame,
                                     std::vector<double> logp) {
  CheckRow(logp, num_tokens_ + 1, "table entry");
  auto& entries = table_[prefix];
  auto pos = std::find_if(entries.begin(), entries.end(),
                          [&](const Entry& e) { return e.min_frame >= min_frame; });
  if (pos != entries.end() && pos->min_frame == min_frame)
    pos->logp = std::move(logp);
  else
    entries.insert(pos, Entry{min_frame, std::move(logp)});
}

std::vector<double> LookupTableAttentionScorer::ScoreNext(const Transcript& prefix,
                                                          int frame_limit) {
  auto it = table_.find(prefix);
  if (it == table_.end()) return fallback_;
  const Entry* chosen = nullptr;
  for (const Entry& e : it->second) {
    if (e.min_frame > frame_limit) break;
    chosen = &e;
  }
  return chosen ? chosen->logp : fallback_;
}

BigramAttentionScorer::BigramAttentionScorer(int num_tokens, std::vector<std::vector<double>> rows)
    : num_tokens_(num_tokens), rows_(std::move(rows)) {
  if (rows_.size() != static_cast<std::size_t>(num_tokens_) + 1)
    throw InputError("bigram table needs " + std::to_string(num_tokens_ + 1) + " rows");
  for (std::size_t r = 0; r < rows_.size(); ++r)
    CheckRow(rows_[r], num_tokens_ + 1, "bigram row " + std::to_string(r));
}

std::vector<double> BigramAttentionScorer::ScoreNext(const Transcript& prefix, int) {
  const TokenId prev = prefix.empty() ? 0 : prefix.labels.back();
  if (prev < 0 || prev > num_tokens_) throw InputError("prefix token out of range");
  return rows_[prev];
}

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> UniformCmlmScorer::Predict(const MaskedTranscript& slots) {
  return std::vector<std::vector<double>>(slots.masked_positions().size(), Uniform(num_tokens_));
}

OracleCmlmScorer::OracleCmlmScorer(int num_tokens, Transcript truth, double confidence)
    : num_tokens_(num_tokens), truth_(std::move(truth)), confidence_(confidence) {
  if (!(confidence_ > 0.0 && confidence_ <= 1.0))
    throw InputError("oracle confidence must be in (0, 1]");
  for (TokenId id : truth_.labels)
    if (id < 1 || id > num_tokens_) throw InputError("oracle truth token out of range");
}

std::vector<std::vector<double>> OracleCmlmScorer::Predict(const MaskedTranscript& slots) {
  std::vector<std::vector<double>> out;
  for (int pos : slots.masked_positions()) {
    if (static_cast<std::size_t>(pos) >= truth_.size()) {
      out.push_back(Uniform(num_tokens_));
      continue;
    }
    const std::size_t truth = AttentionIndex(truth_.labels[pos]);
    std::vector<double> row;
    if (confidence_ == 1.0 || num_tokens_ == 1) {
      row.assign(num_tokens_, kNegInf);
      row[truth] = 0.0;
    } else {
      row.assign(num_tokens_, std::log((1.0 - confidence_) / (num_tokens_ - 1)));
      row[truth] = std::log(confidence_);
    }
    out.push_back(std::move(row));
  }
  return out;
}

BigramCmlmScorer::BigramCmlmScorer(int num_tokens, const std::vector<std::vector<double>>& rows)
    : num_tokens_(num_tokens) {
  if (rows.size() != static_cast<std::size_t>(num_tokens_) + 1)
    throw InputError("bigram table needs " + std::to_string(num_tokens_ + 1) + " rows");
  for (const auto& r : rows) {
    if (r.size() != static_cast<std::size_t>(num_tokens_) + 1)
      throw InputError("bigram row has the wrong width");
    std::vector<double> tokens(r.begin(), r.begin() + num_tokens_);
    const double z = simd::LogSumExp(tokens);
    if (z == kNegInf) {
      tokens = Uniform(num_tokens_);
    } else {
      for (double& x : tokens) x -= z;
    }
    rows_.push_back(std::move(tokens));
  }
}

std::vector<std::vector<double>> BigramCmlmScorer::Predict(const MaskedTranscript& slots) {
  std::vector<std::vector<double>> out;
  for (int pos : slots.masked_positions()) {
    const TokenId left = pos == 0 ? 0 : slots.slots[pos - 1];
    if (left == kMaskSlot)
      out.push_back(Uniform(num_tokens_));
    else
      out.push_back(rows_.at(static_cast<std::size_t>(left)));
  }
  return out;
}

// ---------------------------------------------------------------------------

ScorerFactory ScorerFactory::FromSpec(const std::string& spec, int num_tokens) {
  if (num_tokens < 1) throw InputError("scorer needs at least one token");
  if (spec == "uniform") {
    ScorerFactory f;
    f.num_tokens_ = num_tokens;
    return f;
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError("unknown scorer spec '" + spec + "'");
  const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "exec") {
    if (arg.empty()) throw InputError("exec scorer needs a command");
    ScorerFactory f;
    f.kind_id_ = Kind::kExec;
    f.kind_ = "exec";
    f.num_tokens_ = num_tokens;
    f.command_ = arg;
    return f;
  }
  if (kind == "table") return FromTableJson(LoadJsonFile(arg), num_tokens, false);
  if (kind == "bigram") return FromTableJson(LoadJsonFile(arg), num_tokens, true);
  throw InputError("unknown scorer kind '" + kind + "'");
}

ScorerFactory ScorerFactory::FromTableJson(const nlohmann::json& doc, int num_tokens,
                                           bool prefer_bigram) {
  ScorerFactory f;
  f.num_tokens_ = num_tokens;
  try {
    if (doc.contains("vocab_size") && doc["vocab_size"].get<int>() != num_tokens)
      throw InputError("scorer table is for " + std::to_string(doc["vocab_size"].get<int>()) +
                       " tokens, vocabulary has " + std::to_string(num_tokens));
    if (doc.contains("bigram")) {
      for (const auto& row : doc["bigram"]) f.bigram_.push_back(LogVectorFromJson(row));
      // Validates shape and normalization.
      BigramAttentionScorer check(num_tokens, f.bigram_);
    }
    if (prefer_bigram) {
      if (f.bigram_.empty()) throw InputError("scorer file has no bigram table");
      f.kind_id_ = Kind::kBigram;
      f.kind_ = "bigram";
      return f;
    }
    f.kind_id_ = Kind::kTable;
    f.kind_ = "table";
    auto parse_entries = [&](const nlohmann::json& list) {
      std::vector<std::pair<Transcript, LookupTableAttentionScorer::Entry>> out;
      for (const auto& e : list) {
        LookupTableAttentionScorer::Entry entry;
        entry.min_frame = e.value("min_frame", 0);
        entry.logp = LogVectorFromJson(e.at("logp"));
        CheckRow(entry.logp, num_tokens + 1, "table entry");
        out.emplace_back(ParseIds(e.at("prefix")), std::move(entry));
      }
      return out;
    };
    if (doc.contains("attention")) {
      const auto& att = doc["attention"];
      if (att.contains("fallback")) {
        f.fallback_ = LogVectorFromJson(att["fallback"]);
        CheckRow(f.fallback_, num_tokens + 1, "fallback distribution");
      }
      if (att.contains("default")) f.shared_entries_ = parse_entries(att["default"]);
      if (att.contains("utterances"))
        for (const auto& [utt, list] : att["utterances"].items())
          f.utt_entries_[utt] = parse_entries(list);
    }
    if (doc.contains("cmlm") && doc["cmlm"].contains("utterances")) {
      for (const auto& [utt, spec] : doc["cmlm"]["utterances"].items())
        f.cmlm_truth_[utt] = {ParseIds(spec.at("truth")), spec.value("confidence", 1.0)};
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scorer table: ") + e.what());
  }
  return f;
}

std::unique_ptr<AttentionScorer> ScorerFactory::Attention(const std::string& utt_id) const {
  switch (kind_id_) {
    case Kind::kUniform:
      return std::make_unique<UniformAttentionScorer>(num_tokens_);
    case Kind::kBigram:
      return std::make_unique<BigramAttentionScorer>(num_tokens_, bigram_);
    case Kind::kExec:
      return std::make_unique<BridgeAttentionScorer>(
          std::make_shared<BridgeSession>(command_, num_tokens_, utt_id));
    case Kind::kTable: {
      auto scorer = std::make_unique<LookupTableAttentionScorer>(num_tokens_, fallback_);
      for (const auto& [prefix, e] : shared_entries_) scorer->Add(prefix, e.min_frame, e.logp);
      if (auto it = utt_entries_.find(utt_id); it != utt_entries_.end())
        for (const auto& [prefix, e] : it->second) scorer->Add(prefix, e.min_frame, e.logp);
      return scorer;
    }
  }
  throw InputError("unreachable scorer kind");
}

std::unique_ptr<CmlmScorer> ScorerFactory::Cmlm(const std::string& utt_id) const {
  switch (kind_id_) {
    case Kind::kUniform:
      return std::make_unique<UniformCmlmScorer>(num_tokens_);
    case Kind::kBigram:
      return std::make_unique<BigramCmlmScorer>(num_tokens_, bigram_);
    case Kind::kExec:
      return std::make_unique<BridgeCmlmScorer>(
          std::make_shared<BridgeSession>(command_, num_tokens_, utt_id));
    case Kind::kTable: {
      if (auto it = cmlm_truth_.find(utt_id); it != cmlm_truth_.end())
        return std::make_unique<OracleCmlmScorer>(num_tokens_, it->second.first,
                                                  it->second.second);
      return std::make_unique<UniformCmlmScorer>(num_tokens_);
    }
  }
  throw InputError("unreachable scorer kind");
}

}  // namespace tastream::harness
