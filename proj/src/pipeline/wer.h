// pipeline/wer.h

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

#ifndef DYNPREC_PIPELINE_WER_H_
#define DYNPREC_PIPELINE_WER_H_

#include <cstdint>
#include <span>

namespace dynprec {
namespace pipeline {

struct WerCounts {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t ref_words = 0;
  std::int64_t hyp_words = 0;
  bool empty_reference = false;  // rate measured against the hypothesis

  std::int64_t Errors() const { return substitutions + deletions + insertions; }
  double Rate() const;
  void Add(const WerCounts &other);
};

// Levenshtein word alignment with uniform edit costs; ties prefer a
// substitution over an insertion+deletion pair.
WerCounts ComputeWer(std::span<const std::int32_t> reference,
                     std::span<const std::int32_t> hypothesis);

}  // namespace pipeline
}  // namespace dynprec

#endif  // DYNPREC_PIPELINE_WER_H_
