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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "synth.hpp"
#include "tastream/ctc.hpp"
#include "tastream/errors.hpp"

namespace tastream::harness {
namespace {

namespace fs = std::filesystem;

const fs::path kFixture = fs::path(TASTREAM_FIXTURE_DIR) / "corpus";

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("tastream_" + std::to_string(::getpid()) + "_" +
                                                 std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(TranscriptTable, BothLayouts) {
  std::istringstream in("u1 t1 t2\n\nu2\tt2 t2\t-3.5\r\nu3\t\t0\n");
  const auto rows = ReadTranscriptTable(in);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].id, "u1");
  EXPECT_EQ(rows[0].tokens, (std::vector<std::string>{"t1", "t2"}));
  EXPECT_EQ(rows[1].tokens, (std::vector<std::string>{"t2", "t2"}));
  EXPECT_TRUE(rows[2].tokens.empty());
}

TEST(Corpus, LoadsCheckedInFixture) {
  const Vocab vocab = Vocab::LoadFile(kFixture / "vocab.txt");
  const auto corpus = LoadCorpus(kFixture / "list.scp", kFixture / "ref.txt", vocab);
  ASSERT_EQ(corpus.size(), 100u);
  for (const auto& u : corpus) {
    EXPECT_EQ(u.emissions.num_labels(), vocab.num_ctc_labels());
    EXPECT_GE(u.reference.size(), 4u);
    EXPECT_NO_THROW(CtcViterbi(u.emissions, u.reference));
  }
}

TEST(Corpus, MissingReferenceAndRelativePaths) {
  TempDir dir;
  fs::create_directories(dir.path() / "sub");
  std::ofstream(dir.path() / "sub" / "x.ctcpost") << "CTCPOST 1 1 2\n0 -inf\n";
  std::ofstream(dir.path() / "list.scp") << "x sub/x.ctcpost\n";
  std::ofstream(dir.path() / "ref.txt") << "y t1\n";
  const auto list = ReadEmissionList(dir.path() / "list.scp");
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0].second, dir.path() / "sub" / "x.ctcpost");
  const Vocab v = Vocab::Synthetic(1);
  EXPECT_THROW(LoadCorpus(dir.path() / "list.scp", dir.path() / "ref.txt", v), FormatError);
  std::ofstream(dir.path() / "ref.txt") << "x t1\n";
  EXPECT_EQ(LoadCorpus(dir.path() / "list.scp", dir.path() / "ref.txt", v).size(), 1u);
  EXPECT_THROW(LoadCorpus(dir.path() / "list.scp", dir.path() / "ref.txt", Vocab::Synthetic(2)),
               FormatError);
}

class SweepTest : public ::testing::Test {
 protected:
  void SetUp() override {
    spec_.num_utts = 12;
    spec_.seed = 77;
    for (const auto& u : testing::GenerateCorpus(spec_))
      corpus_.push_back({u.id, u.emissions, u.truth});
    utts_ = testing::GenerateCorpus(spec_);
  }
  testing::SynthSpec spec_;
  std::vector<testing::SynthUtterance> utts_;
  std::vector<CorpusUtterance> corpus_;
};

TEST_F(SweepTest, TableGridLabels) {
  const auto f = ScorerFactory::FromSpec("uniform", spec_.vocab_size);
  const std::vector<int> spans{4, 8, 12, 16};
  const auto rows = SweepLatency(corpus_, spans, {}, f);
  ASSERT_EQ(rows.size(), 4u);
  const double want[] = {160, 320, 480, 640};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(rows[i].span, spans[i]);
    EXPECT_EQ(rows[i].latency_ms, want[i]);
  }
  std::ostringstream out;
  WriteSweepTable(rows, out);
  std::istringstream lines(out.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  EXPECT_EQ(header, "span\tlatency_ms\tter\tmean_utt_ter\tsub\tins\tdel\tref_tokens");
  EXPECT_EQ(first.substr(0, 6), "4\t160\t");
}

TEST_F(SweepTest, SingleSpanEqualsDirectEvaluate) {
  const auto f = ScorerFactory::FromTableJson(testing::ScorerTable(spec_, utts_), spec_.vocab_size);
  const std::vector<int> spans{3};
  const auto rows = SweepLatency(corpus_, spans, {}, f);
  std::vector<Transcript> refs, hyps;
  for (const auto& u : corpus_) {
    auto s = f.Attention(u.id);
    refs.push_back(u.reference);
    hyps.push_back(TriggeredDecode(u.emissions, *s, {0.5, 10, 3}).front().prefix);
  }
  const auto direct = Evaluate(refs, hyps);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].report.token_error_rate, direct.token_error_rate);
  EXPECT_EQ(rows[0].report.totals.errors(), direct.totals.errors());
}

TEST_F(SweepTest, EmptyCorpus) {
  const std::vector<int> spans{1};
  EXPECT_THROW(SweepLatency({}, spans, {}, ScorerFactory::FromSpec("uniform", 2)), InputError);
}

TEST(Synth, DeterministicGivenSeed) {
  testing::SynthSpec spec;
  spec.num_utts = 8;
  TempDir d1, d2;
  testing::WriteCorpus(spec, testing::GenerateCorpus(spec), d1.path());
  testing::WriteCorpus(spec, testing::GenerateCorpus(spec), d2.path());
  for (const char* f : {"list.scp", "ref.txt", "scorer.json", "vocab.txt", "lat/utt005.ctcpost"})
    EXPECT_EQ(Slurp(d1.path() / f), Slurp(d2.path() / f)) << f;
  spec.seed += 1;
  TempDir d3;
  testing::WriteCorpus(spec, testing::GenerateCorpus(spec), d3.path());
  EXPECT_NE(Slurp(d1.path() / "ref.txt"), Slurp(d3.path() / "ref.txt"));
}

TEST(Synth, SharpSpikesDecodeExactly) {
  testing::SynthSpec spec;
  spec.num_utts = 30;
  spec.sharpness = 40.0;
  spec.confusion_rate = 0.0;
  for (const auto& u : testing::GenerateCorpus(spec)) {
    EXPECT_EQ(CtcGreedy(u.emissions).transcript, u.truth);
    EXPECT_EQ(ExtractTriggers(CtcViterbi(u.emissions, u.truth).path), u.triggers);
  }
}

TEST(Synth, ModerateNoiseGivesPartialErrors) {
  testing::SynthSpec spec;
  spec.num_utts = 50;
  std::vector<Transcript> refs, hyps;
  for (const auto& u : testing::GenerateCorpus(spec)) {
    refs.push_back(u.truth);
    hyps.push_back(CtcGreedy(u.emissions).transcript);
  }
  const double ter = Evaluate(refs, hyps).token_error_rate;
  EXPECT_GT(ter, 10.0);
  EXPECT_LT(ter, 50.0);
}

TEST(Synth, InfeasibleSpec) {
  testing::SynthSpec spec;
  spec.min_len = 5;
  spec.max_len = 3;
  EXPECT_THROW(testing::GenerateCorpus(spec), std::invalid_argument);
}

}  // namespace
}  // namespace tastream::harness
