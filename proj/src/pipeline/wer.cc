// pipeline/wer.cc

// Copyright 2026  Dynprec Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "pipeline/wer.h"

#include <vector>

namespace dynprec {
namespace pipeline {

double WerCounts::Rate() const {
  const std::int64_t denom = empty_reference ? hyp_words : ref_words;
  if (denom == 0) return 0.0;
  return static_cast<double>(Errors()) / static_cast<double>(denom);
}

void WerCounts::Add(const WerCounts &other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  ref_words += other.ref_words;
  hyp_words += other.hyp_words;
  empty_reference = empty_reference && other.empty_reference;
}

WerCounts ComputeWer(std::span<const std::int32_t> reference,
                     std::span<const std::int32_t> hypothesis) {
  const int n = static_cast<int>(reference.size());
  const int m = static_cast<int>(hypothesis.size());

  WerCounts counts;
  counts.ref_words = n;
  counts.hyp_words = m;
  counts.empty_reference = n == 0;

  // d[i][j]: edit distance between ref[0..i) and hyp[0..j).
  std::vector<std::vector<std::int32_t>> d(n + 1,
                                           std::vector<std::int32_t>(m + 1));
  for (int i = 0; i <= n; ++i) d[i][0] = i;
  for (int j = 0; j <= m; ++j) d[0][j] = j;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const std::int32_t diag =
          d[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      const std::int32_t del = d[i - 1][j] + 1;
      const std::int32_t ins = d[i][j - 1] + 1;
      d[i][j] = std::min({diag, del, ins});
    }
  }

  // Backtrace; on equal cost take the diagonal first (substitution wins over
  // insertion+deletion), then deletion, then insertion.
  int i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const std::int32_t diag =
          d[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      if (d[i][j] == diag) {
        if (reference[i - 1] != hypothesis[j - 1]) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++counts.deletions;
      --i;
      continue;
    }
    ++counts.insertions;
    --j;
  }
  return counts;
}

}  // namespace pipeline
}  // namespace dynprec
