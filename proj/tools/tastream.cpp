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

// tastream command-line front end.
//
//   tastream decode --mode {ctc-greedy|ctc-prefix|triggered|mask-ctc} ...
//   tastream align  --emissions F --vocab F --text F
//   tastream stream --emissions F|- --vocab F ...
//   tastream eval   --ref F --hyp F
//   tastream sweep  --emissions-list F --ref F --vocab F --spans 4,8,12,16
//
// Hypotheses print as "<utt-id>\t<tokens>\t<score>". Errors print one
// "tastream: error: ..." line on stderr and exit with status 1.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tastream/ctc.hpp"
#include "tastream/errors.hpp"
#include "tastream/harness/corpus.hpp"
#include "tastream/harness/eval.hpp"
#include "tastream/harness/scorers.hpp"
#include "tastream/harness/stream.hpp"
#include "tastream/lattice.hpp"
#include "tastream/mask_ctc.hpp"
#include "tastream/trigger_decode.hpp"

namespace fs = std::filesystem;
using namespace tastream;
using namespace tastream::harness;

namespace {

struct Inputs {
  std::string emissions;
  std::string emissions_list;
  std::string vocab;
  std::string scorer = "uniform";
};

void AddInputs(CLI::App* cmd, Inputs& in, bool need_vocab = true) {
  auto* one = cmd->add_option("--emissions", in.emissions, "CTCPOST lattice file");
  auto* list = cmd->add_option("--emissions-list", in.emissions_list,
                               "file of '<utt-id> <path>' lines");
  one->excludes(list);
  auto* v = cmd->add_option("--vocab", in.vocab, "vocabulary, one token per line");
  if (need_vocab) v->required();
}

// (utt-id, path) pairs for a single file or a list.
std::vector<std::pair<std::string, fs::path>> Utterances(const Inputs& in) {
  if (!in.emissions_list.empty()) return ReadEmissionList(in.emissions_list);
  if (in.emissions.empty()) throw InputError("one of --emissions or --emissions-list is required");
  return {{fs::path(in.emissions).stem().string(), in.emissions}};
}

EmissionMatrix LoadChecked(const fs::path& path, const Vocab& vocab) {
  EmissionMatrix e = LoadEmissionsFile(path);
  if (e.num_labels() != vocab.num_ctc_labels())
    throw InputError(path.string() + ": lattice has " + std::to_string(e.num_labels()) +
                     " labels, vocabulary has " + std::to_string(vocab.num_ctc_labels()));
  return e;
}

std::string Score(double v) {
  if (v == kNegInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void PrintHypothesis(const std::string& utt, const Vocab& vocab, const Transcript& t, double score) {
  std::cout << utt << '\t' << vocab.Render(t) << '\t' << Score(score) << '\n';
}

// ---------------------------------------------------------------------------

struct DecodeArgs {
  Inputs in;
  std::string mode = "triggered";
  int beam = 10;
  double weight = 0.5;
  int lookahead = 0;
  std::optional<int> delta;
  double threshold = 0.9;
  int iterations = 10;
  std::string schedule = "easy-first";
  std::string confidence = "run-max";
};

ConfidenceRule ParseConfidence(const std::string& s) {
  return s == "run-mean" ? ConfidenceRule::kRunMean : ConfidenceRule::kRunMax;
}

int RunDecode(const DecodeArgs& a) {
  const Vocab vocab = Vocab::LoadFile(a.in.vocab);
  const int num_tokens = vocab.num_ctc_labels() - 1;
  const DecodeConfig dc{a.weight, a.beam, a.delta.value_or(a.lookahead)};
  dc.Validate();
  const bool needs_scorer = a.mode == "triggered" || a.mode == "mask-ctc";
  std::optional<ScorerFactory> factory;
  if (needs_scorer) factory = ScorerFactory::FromSpec(a.in.scorer, num_tokens);

  for (const auto& [utt, path] : Utterances(a.in)) {
    const EmissionMatrix e = LoadChecked(path, vocab);
    if (a.mode == "ctc-greedy") {
      const GreedyResult g = CtcGreedy(e, ParseConfidence(a.confidence));
      double logp = 0.0;
      for (int t = 0; t < e.num_frames(); ++t) logp += e(t, g.argmax_path.labels[t]);
      PrintHypothesis(utt, vocab, g.transcript, logp);
    } else if (a.mode == "ctc-prefix") {
      const auto beam = CtcPrefixBeam(e, a.beam);
      PrintHypothesis(utt, vocab, beam.front().transcript, beam.front().score);
    } else if (a.mode == "triggered") {
      auto scorer = factory->Attention(utt);
      const auto beam = TriggeredDecode(e, *scorer, dc);
      PrintHypothesis(utt, vocab, beam.front().prefix, beam.front().combined);
    } else {
      auto scorer = factory->Cmlm(utt);
      MaskCtcConfig mc;
      mc.threshold = a.threshold;
      mc.max_iterations = a.iterations;
      mc.schedule = a.schedule == "parallel" ? FillSchedule::kParallel : FillSchedule::kEasyFirst;
      mc.confidence = ParseConfidence(a.confidence);
      const Transcript t = MaskCtcDecode(e, *scorer, mc);
      PrintHypothesis(utt, vocab, t, CtcLogProb(e, t));
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct AlignArgs {
  Inputs in;
  std::string text;
  std::string source = "forced";
};

int RunAlign(const AlignArgs& a) {
  const Vocab vocab = Vocab::LoadFile(a.in.vocab);
  std::map<std::string, Transcript> text;
  const auto utts = Utterances(a.in);
  if (a.source == "forced") {
    if (a.text.empty()) throw InputError("--text is required for forced alignment");
    if (a.in.emissions_list.empty()) {
      std::ifstream f(a.text);
      if (!f) throw FormatError("cannot open " + a.text);
      std::string all((std::istreambuf_iterator<char>(f)), {});
      text[utts.front().first] = vocab.Parse(all);
    } else {
      for (const auto& line : ReadTranscriptTableFile(a.text)) {
        std::string joined;
        for (const auto& tok : line.tokens) joined += tok + ' ';
        text[line.id] = vocab.Parse(joined);
      }
    }
  }
  for (const auto& [utt, path] : utts) {
    const EmissionMatrix e = LoadChecked(path, vocab);
    FramePath p;
    double logp = 0.0;
    TriggerSequence triggers;
    if (a.source == "forced") {
      auto it = text.find(utt);
      if (it == text.end()) throw InputError("no transcript for " + utt);
      const ForcedAlignment f = CtcViterbi(e, it->second);
      p = f.path;
      logp = f.log_prob;
      triggers = f.triggers;
    } else {
      p = CtcGreedy(e).argmax_path;
      for (int t = 0; t < e.num_frames(); ++t) logp += e(t, p.labels[t]);
      triggers = ExtractTriggers(p);
    }
    std::string frames;
    for (std::size_t i = 0; i < triggers.size(); ++i)
      frames += (i ? " " : "") + std::to_string(triggers.frames[i]);
    std::cout << utt << '\t' << vocab.Render(p.labels) << '\t' << frames << '\t' << Score(logp)
              << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct StreamArgs {
  Inputs in;
  std::string utt;
  double frame_shift_ms = 10.0;
  int subsample = 4;
  int lookahead = 0;
  std::optional<int> delta;
  double weight = 0.5;
  int beam = 10;
  int chunk = 1;
};

int RunStream(const StreamArgs& a) {
  const Vocab vocab = Vocab::LoadFile(a.in.vocab);
  if (a.in.emissions.empty()) throw InputError("--emissions is required");
  const auto factory = ScorerFactory::FromSpec(a.in.scorer, vocab.num_ctc_labels() - 1);
  const bool from_stdin = a.in.emissions == "-";
  const std::string utt =
      !a.utt.empty() ? a.utt : from_stdin ? "stdin" : fs::path(a.in.emissions).stem().string();

  std::ifstream file;
  if (!from_stdin) {
    file.open(a.in.emissions);
    if (!file) throw FormatError("cannot open " + a.in.emissions);
  }
  std::istream& in = from_stdin ? std::cin : file;
  ReaderFrameSource source(in);
  if (source.num_labels() != vocab.num_ctc_labels())
    throw InputError("lattice has " + std::to_string(source.num_labels()) +
                     " labels, vocabulary has " + std::to_string(vocab.num_ctc_labels()));

  StreamConfig cfg;
  cfg.latency = {a.frame_shift_ms, a.subsample, a.lookahead};
  cfg.delta = a.delta;
  cfg.weight = a.weight;
  cfg.beam = a.beam;
  cfg.chunk_frames = a.chunk;
  auto scorer = factory.Attention(utt);
  const StreamResult r = StreamDecode(source, *scorer, cfg);

  for (const StreamEvent& ev : r.events) {
    nlohmann::json j{{"utt", utt},
                     {"kind", ev.kind == EventKind::kFinal ? "final" : "partial"},
                     {"transcript", vocab.Render(ev.transcript)},
                     {"frame_issued", ev.frame_issued},
                     {"wallclock_simulated_ms", ev.wallclock_simulated_ms}};
    if (ev.kind == EventKind::kFinal) {
      j["encoder_latency_ms"] = r.encoder_latency_ms;
      j["token_latency_ms"] = r.token_latency_ms;
      j["triggers"] = r.final_hypothesis.triggers.frames;
      if (!ev.diagnostic.empty()) j["diagnostic"] = ev.diagnostic;
    }
    std::cout << j.dump() << '\n';
  }
  if (r.interrupted) {
    std::cout.flush();
    std::cerr << "tastream: error: " << r.events.back().diagnostic << '\n';
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string ref, hyp;
  bool per_utt = false;
};

int RunEval(const EvalArgs& a) {
  const auto refs = ReadTranscriptTableFile(a.ref);
  std::map<std::string, std::vector<std::string>> hyp_by_id;
  for (auto& line : ReadTranscriptTableFile(a.hyp)) hyp_by_id[line.id] = std::move(line.tokens);
  if (hyp_by_id.size() != refs.size())
    throw InputError("reference has " + std::to_string(refs.size()) + " utterances, hypothesis " +
                     std::to_string(hyp_by_id.size()));
  // Token strings are interned into ids so no vocabulary file is needed.
  std::map<std::string, TokenId> ids;
  auto intern = [&](const std::vector<std::string>& toks) {
    Transcript t;
    for (const auto& s : toks) t.labels.push_back(ids.emplace(s, ids.size() + 1).first->second);
    return t;
  };
  std::vector<Transcript> r, h;
  std::vector<std::string> utt;
  for (const auto& line : refs) {
    auto it = hyp_by_id.find(line.id);
    if (it == hyp_by_id.end()) throw InputError("no hypothesis for " + line.id);
    r.push_back(intern(line.tokens));
    h.push_back(intern(it->second));
    utt.push_back(line.id);
  }
  const EvalReport report = Evaluate(r, h, utt);
  if (a.per_utt) {
    for (const auto& u : report.per_utterance) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", u.ter);
      std::cout << u.id << '\t' << buf << '\t' << u.counts.substitutions << '\t'
                << u.counts.insertions << '\t' << u.counts.deletions << '\t' << u.counts.ref_tokens
                << '\n';
    }
  }
  std::cout << FormatSummary(report) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  Inputs in;
  std::string ref;
  std::vector<int> spans{4, 8, 12, 16};
  SweepConfig cfg;
};

int RunSweep(const SweepArgs& a) {
  const Vocab vocab = Vocab::LoadFile(a.in.vocab);
  if (a.in.emissions_list.empty()) throw InputError("--emissions-list is required");
  const auto corpus = LoadCorpus(a.in.emissions_list, a.ref, vocab);
  const auto factory = ScorerFactory::FromSpec(a.in.scorer, vocab.num_ctc_labels() - 1);
  WriteSweepTable(SweepLatency(corpus, a.spans, a.cfg, factory), std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming joint CTC / triggered-attention decoding toolkit"};
  app.require_subcommand(1);

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "decode lattices to transcripts");
  AddInputs(decode, dec.in);
  decode->add_option("--mode", dec.mode)
      ->check(CLI::IsMember({"ctc-greedy", "ctc-prefix", "triggered", "mask-ctc"}))
      ->capture_default_str();
  decode->add_option("--beam", dec.beam)->capture_default_str();
  decode->add_option("--weight", dec.weight, "attention weight")->capture_default_str();
  decode->add_option("--lookahead", dec.lookahead, "encoder look-ahead frames")
      ->capture_default_str();
  decode->add_option("--delta", dec.delta, "decoder look-ahead frames (default: --lookahead)");
  decode->add_option("--threshold", dec.threshold, "mask-ctc confidence threshold")
      ->capture_default_str();
  decode->add_option("--iterations", dec.iterations, "mask-ctc refill rounds")
      ->capture_default_str();
  decode->add_option("--schedule", dec.schedule)
      ->check(CLI::IsMember({"easy-first", "parallel"}))
      ->capture_default_str();
  decode->add_option("--confidence", dec.confidence)
      ->check(CLI::IsMember({"run-max", "run-mean"}))
      ->capture_default_str();
  decode->add_option("--scorer", dec.in.scorer, "uniform | table:F | bigram:F | exec:CMD")
      ->capture_default_str();

  AlignArgs al;
  auto* align = app.add_subcommand("align", "alignment path and trigger frames");
  AddInputs(align, al.in);
  align->add_option("--text", al.text, "transcript (table when aligning a list)");
  align->add_option("--source", al.source, "forced (Viterbi) or best-path")
      ->check(CLI::IsMember({"forced", "best-path"}))
      ->capture_default_str();

  StreamArgs st;
  auto* stream = app.add_subcommand("stream", "simulated streaming decode, JSON lines");
  stream->add_option("--emissions", st.in.emissions, "CTCPOST lattice, '-' for stdin")
      ->required();
  stream->add_option("--vocab", st.in.vocab)->required();
  stream->add_option("--utt", st.utt, "utterance id (default: file stem)");
  stream->add_option("--frame-shift-ms", st.frame_shift_ms)->capture_default_str();
  stream->add_option("--subsample", st.subsample)->capture_default_str();
  stream->add_option("--lookahead", st.lookahead, "encoder look-ahead frames")
      ->capture_default_str();
  stream->add_option("--delta", st.delta, "decoder look-ahead frames (default: --lookahead)");
  stream->add_option("--weight", st.weight)->capture_default_str();
  stream->add_option("--beam", st.beam)->capture_default_str();
  stream->add_option("--chunk", st.chunk, "frames per arrival")->capture_default_str();
  stream->add_option("--scorer", st.in.scorer)->capture_default_str();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "token error rate");
  eval->add_option("--ref", ev.ref)->required();
  eval->add_option("--hyp", ev.hyp)->required();
  eval->add_flag("--per-utt", ev.per_utt, "also print one line per utterance");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "TER against encoder look-ahead");
  AddInputs(sweep, sw.in);
  sweep->add_option("--ref", sw.ref)->required();
  sweep->add_option("--spans", sw.spans)->delimiter(',')->capture_default_str();
  sweep->add_option("--frame-shift-ms", sw.cfg.frame_shift_ms)->capture_default_str();
  sweep->add_option("--subsample", sw.cfg.subsample_factor)->capture_default_str();
  sweep->add_option("--delta", sw.cfg.delta, "decoder look-ahead (default: each span)");
  sweep->add_option("--weight", sw.cfg.weight)->capture_default_str();
  sweep->add_option("--beam", sw.cfg.beam)->capture_default_str();
  sweep->add_option("--scorer", sw.in.scorer)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*decode) return RunDecode(dec);
    if (*align) return RunAlign(al);
    if (*stream) return RunStream(st);
    if (*eval) return RunEval(ev);
    if (*sweep) return RunSweep(sw);
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "tastream: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
