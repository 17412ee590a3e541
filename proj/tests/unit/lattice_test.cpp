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

#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tastream/errors.hpp"

namespace tastream {
namespace {

using testing::kInf;
using testing::RandomEmissions;

constexpr TokenId a = 1, b = 2;

TEST(LogAdd, GuardsNegativeInfinity) {
  EXPECT_EQ(LogAdd(kNegInf, kNegInf), kNegInf);
  EXPECT_EQ(LogAdd(kNegInf, -3.0), -3.0);
  EXPECT_EQ(LogAdd(-3.0, kNegInf), -3.0);
  EXPECT_NEAR(LogAdd(std::log(0.25), std::log(0.5)), std::log(0.75), 1e-15);
}

TEST(Collapse, AllBlankIsEmpty) {
  EXPECT_TRUE(Collapse(FramePath{{0, 0, 0}}, 3).empty());
}

TEST(Collapse, BlankSeparatesRepeats) {
  EXPECT_EQ(Collapse(FramePath{{a, a, 0, a}}, 3).labels, (std::vector<TokenId>{a, a}));
  EXPECT_EQ(Collapse(FramePath{{0, a, a, b, 0, b}}, 3).labels, (std::vector<TokenId>{a, b, b}));
}

TEST(Collapse, RejectsOutOfRangeLabel) {
  EXPECT_THROW(Collapse(FramePath{{0, 3}}, 3), InputError);
  EXPECT_THROW(Collapse(FramePath{{-1}}, 3), InputError);
}

TEST(Collapse, InvariantUnderDuplicatingAnyElement) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> label(0, 3), len(1, 12);
  for (int trial = 0; trial < 500; ++trial) {
    FramePath p;
    for (int i = len(rng); i > 0; --i) p.labels.push_back(label(rng));
    const auto base = Collapse(p, 4);
    std::uniform_int_distribution<std::size_t> pos(0, p.size() - 1);
    FramePath q = p;
    const std::size_t i = pos(rng);
    q.labels.insert(q.labels.begin() + static_cast<std::ptrdiff_t>(i), q.labels[i]);
    EXPECT_EQ(Collapse(q, 4), base);
    EXPECT_EQ(Collapse(p, 4).labels, testing::NaiveCollapse(p.labels));
  }
}

TEST(Collapse, SurjectiveOntoShortTranscripts) {
  // Every blank-free sequence that fits in T frames (one frame per token
  // plus a blank between equal neighbours) is hit by some length-T path.
  const int T = 4, L = 3;
  std::set<std::vector<int>> hit;
  testing::ForEachPath(T, L, [&](const std::vector<int>& p) {
    hit.insert(Collapse(FramePath{p}, L).labels);
  });
  std::size_t fitting = 0;
  for (const auto& y : testing::AllTranscripts(T, L - 1)) {
    std::size_t need = y.size();
    for (std::size_t i = 1; i < y.size(); ++i) need += y[i] == y[i - 1];
    if (need <= T) {
      ++fitting;
      EXPECT_TRUE(hit.count(y));
    }
  }
  EXPECT_EQ(hit.size(), fitting);
}

TEST(Vocab, BlankFirstAndEosLast) {
  const Vocab v({"<blank>", "a", "b", "<eos>"});
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.num_ctc_labels(), 3);
  EXPECT_EQ(v.eos_id(), 3);
  EXPECT_EQ(v.Find("b"), 2);
  EXPECT_FALSE(v.Find("c"));
  EXPECT_THROW(Vocab({"a", "<blank>"}), InputError);
  EXPECT_THROW(Vocab({"<blank>", "<eos>", "a"}), InputError);
  EXPECT_THROW(Vocab({"<blank>", "a", "a"}), InputError);
}

TEST(Vocab, ParseAndRender) {
  const Vocab v = Vocab::Synthetic(3, true);
  EXPECT_EQ(v.Parse(" t1\tt3  t1 ").labels, (std::vector<TokenId>{1, 3, 1}));
  EXPECT_EQ(v.Render(v.Parse("t2 t1")), "t2 t1");
  EXPECT_TRUE(v.Parse("").empty());
  EXPECT_THROW(v.Parse("t9"), InputError);
  EXPECT_THROW(v.Parse("<blank>"), InputError);
  EXPECT_THROW(v.Parse("t1 <eos>"), InputError);
}

TEST(Vocab, LoadFromLines) {
  std::istringstream in("<blank>\r\nx\ny\n");
  const Vocab v = Vocab::Load(in);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.token(2), "y");
  std::istringstream bad("<blank>\n\nx\n");
  EXPECT_THROW(Vocab::Load(bad), FormatError);
}

TEST(EmissionMatrix, RejectsEmptyAndUnnormalized) {
  EXPECT_THROW(EmissionMatrix(0, 2, {}), InputError);
  EXPECT_THROW(EmissionMatrix(1, 2, {0.0, 0.0}), InputError);
  EXPECT_THROW(EmissionMatrix(1, 2, {0.0}), InputError);
  EXPECT_THROW(EmissionMatrix(1, 2, {kInf, 0.0}), InputError);
  EXPECT_THROW(EmissionMatrix(1, 2, {std::nan(""), 0.0}), InputError);
  EXPECT_NO_THROW(EmissionMatrix(1, 2, {0.0, kNegInf}));
  // Within the 1e-6 tolerance.
  EXPECT_NO_THROW(EmissionMatrix(1, 2, {std::log(0.5) + 5e-7, std::log(0.5)}));
  EXPECT_THROW(EmissionMatrix(1, 2, {std::log(0.5) + 5e-6, std::log(0.5)}), InputError);
}

TEST(EmissionFormat, LoadsDeclaredShape) {
  std::istringstream in("CTCPOST 1 2 3\n-0.5 -1.5 -1.5\n0 -inf -inf\n");
  EXPECT_THROW(LoadEmissions(in), FormatError);  // first row is not normalized
  const double h = std::log(0.5);
  std::ostringstream good;
  good.precision(17);
  good << "CTCPOST 1 2 3\n" << 0 << " -inf -inf\n-inf " << h << " " << h << "\n";
  std::istringstream in2(good.str());
  const EmissionMatrix m = LoadEmissions(in2);
  EXPECT_EQ(m.num_frames(), 2);
  EXPECT_EQ(m.num_labels(), 3);
  EXPECT_EQ(m(1, 2), h);
  EXPECT_EQ(m(0, 1), kNegInf);
}

TEST(EmissionFormat, ShortRowIsFormatError) {
  std::istringstream in("CTCPOST 1 1 3\n0 -inf\n");
  try {
    LoadEmissions(in);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(EmissionFormat, HeaderAndTruncation) {
  for (const char* text : {"", "CTCPOST 2 1 1\n0\n", "CTCPOST 1 0 1\n", "POST 1 1 1\n0\n",
                           "CTCPOST 1 2 1\n0\n", "CTCPOST 1 1 1\nzero\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(LoadEmissions(in), FormatError) << text;
  }
}

TEST(EmissionFormat, CanonicalText) {
  EXPECT_EQ(FormatEmissions(EmissionMatrix(1, 2, {0.0, kNegInf})), "CTCPOST 1 1 2\n0 -inf\n");
}

TEST(EmissionFormat, RoundTripIsExact) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const EmissionMatrix m = RandomEmissions(rng, 1 + trial % 7, 2 + trial % 4);
    const std::string text = FormatEmissions(m);
    std::istringstream in(text);
    const EmissionMatrix back = LoadEmissions(in);
    EXPECT_EQ(back, m);
    EXPECT_EQ(FormatEmissions(back), text);
  }
}

TEST(EmissionFormat, SaveOfLoadCanonicalizes) {
  const double h = std::log(0.5);
  std::ostringstream loose;
  loose.precision(20);
  loose << "CTCPOST   1 1 2 \r\n" << h << "\t" << h << "  \n";
  std::istringstream in(loose.str());
  const std::string once = FormatEmissions(LoadEmissions(in));
  std::istringstream in2(once);
  EXPECT_EQ(FormatEmissions(LoadEmissions(in2)), once);
}

TEST(EmissionReader, ReadsIncrementally) {
  std::istringstream in("CTCPOST 1 3 1\n0\n0\n");
  EmissionReader r(in);
  EXPECT_TRUE(r.NextRow());
  EXPECT_TRUE(r.NextRow());
  EXPECT_EQ(r.rows_read(), 2);
  EXPECT_THROW(r.NextRow(), FormatError);
}

TEST(Latency, TableGrid) {
  LatencySpec spec;
  EXPECT_EQ(spec.frame_shift_ms, 10.0);
  EXPECT_EQ(spec.subsample_factor, 4);
  const int spans[] = {0, 4, 8, 12, 16};
  const double expected[] = {0, 160, 320, 480, 640};
  for (int i = 0; i < 5; ++i) {
    spec.lookahead_frames = spans[i];
    EXPECT_EQ(LatencyMs(spec), expected[i]);
  }
}

TEST(Latency, StrictlyIncreasingAndLinear) {
  LatencySpec spec{7.5, 3, 0};
  const double step = spec.encoder_frame_ms();
  for (int k = 0; k < 40; ++k) {
    spec.lookahead_frames = k;
    EXPECT_DOUBLE_EQ(LatencyMs(spec), k * step);
  }
}

TEST(Latency, RejectsInvalidSpec) {
  EXPECT_THROW(LatencyMs({0.0, 4, 1}), InputError);
  EXPECT_THROW(LatencyMs({10.0, 0, 1}), InputError);
  EXPECT_THROW(LatencyMs({10.0, 4, -1}), InputError);
}

}  // namespace
}  // namespace tastream
