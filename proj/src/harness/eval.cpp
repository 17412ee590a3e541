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

#include "tastream/harness/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "tastream/errors.hpp"

namespace tastream::harness {

EditCounts AlignCounts(const Transcript& ref, const Transcript& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const int diag = d[i - 1][j - 1] + (ref.labels[i - 1] == hyp.labels[j - 1] ? 0 : 1);
      d[i][j] = std::min({diag, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }

  EditCounts c;
  c.ref_tokens = static_cast<int>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref.labels[i - 1] == hyp.labels[j - 1];
      if (d[i][j] == d[i - 1][j - 1] + (same ? 0 : 1)) {
        if (!same) ++c.substitutions;
        --i, --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

EvalReport Evaluate(const std::vector<Transcript>& refs, const std::vector<Transcript>& hyps,
                    const std::vector<std::string>& ids) {
  if (refs.size() != hyps.size())
    throw InputError("evaluate got " + std::to_string(refs.size()) + " references and " +
                     std::to_string(hyps.size()) + " hypotheses");
  if (!ids.empty() && ids.size() != refs.size()) throw InputError("id count mismatch");
  EvalReport report;
  double ter_sum = 0.0;
  for (std::size_t u = 0; u < refs.size(); ++u) {
    UtteranceEval ue;
    ue.id = ids.empty() ? std::to_string(u) : ids[u];
    ue.counts = AlignCounts(refs[u], hyps[u]);
    if (ue.counts.ref_tokens > 0)
      ue.ter = 100.0 * ue.counts.errors() / ue.counts.ref_tokens;
    else
      ue.ter = ue.counts.errors() > 0 ? 100.0 : 0.0;
    ter_sum += ue.ter;
    report.totals.substitutions += ue.counts.substitutions;
    report.totals.insertions += ue.counts.insertions;
    report.totals.deletions += ue.counts.deletions;
    report.totals.ref_tokens += ue.counts.ref_tokens;
    report.per_utterance.push_back(std::move(ue));
  }
  if (report.totals.ref_tokens > 0)
    report.token_error_rate = 100.0 * report.totals.errors() / report.totals.ref_tokens;
  if (!refs.empty()) report.mean_utterance_ter = ter_sum / static_cast<double>(refs.size());
  return report;
}

std::string FormatSummary(const EvalReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%%TER %.2f [ %d / %d, %d ins, %d del, %d sub ]",
                r.token_error_rate, r.totals.errors(), r.totals.ref_tokens, r.totals.insertions,
                r.totals.deletions, r.totals.substitutions);
  return buf;
}

}  // namespace tastream::harness
