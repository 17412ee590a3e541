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

#include "tastream/harness/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "tastream/errors.hpp"

namespace tastream::harness {
namespace {

std::vector<std::string> SplitWs(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::filesystem::path>> ReadEmissionList(
    const std::filesystem::path& list) {
  std::ifstream in(list);
  if (!in) throw FormatError("cannot open emission list " + list.string());
  std::vector<std::pair<std::string, std::filesystem::path>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = SplitWs(line);
    if (f.empty()) continue;
    if (f.size() != 2) throw FormatError("expected '<utt-id> <path>'", lineno);
    std::filesystem::path p(f[1]);
    if (p.is_relative()) p = list.parent_path() / p;
    out.emplace_back(f[0], p);
  }
  return out;
}

std::vector<TranscriptLine> ReadTranscriptTable(std::istream& in) {
  std::vector<TranscriptLine> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    TranscriptLine t;
    const auto tab = line.find('\t');
    if (tab != std::string::npos) {
      t.id = line.substr(0, tab);
      const auto tab2 = line.find('\t', tab + 1);
      t.tokens = SplitWs(line.substr(tab + 1, tab2 == std::string::npos ? std::string::npos
                                                                        : tab2 - tab - 1));
    } else {
      auto f = SplitWs(line);
      if (f.empty()) continue;
      t.id = f[0];
      t.tokens.assign(f.begin() + 1, f.end());
    }
    if (t.id.empty()) continue;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TranscriptLine> ReadTranscriptTableFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open transcript table " + path.string());
  return ReadTranscriptTable(in);
}

std::vector<CorpusUtterance> LoadCorpus(const std::filesystem::path& list,
                                        const std::filesystem::path& refs, const Vocab& vocab) {
  std::map<std::string, Transcript> ref_by_id;
  for (const auto& line : ReadTranscriptTableFile(refs)) {
    std::string joined;
    for (const auto& tok : line.tokens) joined += tok + " ";
    ref_by_id[line.id] = vocab.Parse(joined);
  }
  std::vector<CorpusUtterance> corpus;
  for (const auto& [id, path] : ReadEmissionList(list)) {
    auto it = ref_by_id.find(id);
    if (it == ref_by_id.end()) throw FormatError("no reference for utterance " + id);
    EmissionMatrix e = LoadEmissionsFile(path);
    if (e.num_labels() != vocab.num_ctc_labels())
      throw FormatError(id + ": lattice has " + std::to_string(e.num_labels()) +
                        " labels, vocabulary has " + std::to_string(vocab.num_ctc_labels()));
    corpus.push_back({id, std::move(e), it->second});
  }
  if (corpus.empty()) throw FormatError("corpus is empty");
  return corpus;
}

std::vector<SweepRow> SweepLatency(const std::vector<CorpusUtterance>& corpus,
                                   std::span<const int> spans, const SweepConfig& config,
                                   const ScorerFactory& scorers) {
  if (corpus.empty()) throw InputError("sweep needs a non-empty corpus");
  std::vector<SweepRow> rows;
  for (int span : spans) {
    LatencySpec latency{config.frame_shift_ms, config.subsample_factor, span};
    DecodeConfig dc{config.weight, config.beam, config.delta.value_or(span)};
    std::vector<Transcript> refs, hyps;
    std::vector<std::string> ids;
    for (const auto& utt : corpus) {
      auto scorer = scorers.Attention(utt.id);
      const auto beam = TriggeredDecode(utt.emissions, *scorer, dc);
      refs.push_back(utt.reference);
      hyps.push_back(beam.front().prefix);
      ids.push_back(utt.id);
    }
    rows.push_back({span, LatencyMs(latency), Evaluate(refs, hyps, ids)});
  }
  return rows;
}

void WriteSweepTable(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "span\tlatency_ms\tter\tmean_utt_ter\tsub\tins\tdel\tref_tokens\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.span << '\t';
    std::snprintf(buf, sizeof(buf), "%g", r.latency_ms);
    out << buf << '\t';
    std::snprintf(buf, sizeof(buf), "%.4f\t%.4f", r.report.token_error_rate,
                  r.report.mean_utterance_ter);
    out << buf << '\t' << r.report.totals.substitutions << '\t' << r.report.totals.insertions
        << '\t' << r.report.totals.deletions << '\t' << r.report.totals.ref_tokens << '\n';
  }
}

}  // namespace tastream::harness
