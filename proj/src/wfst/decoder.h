// wfst/decoder.h

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

// Viterbi beam search over the decoding graph. For each frame every token
// is replaced by candidates over its emitting arcs (graph cost plus scaled
// acoustic cost), the per-state minimum is kept, epsilon arcs are relaxed to
// a fixpoint within the frame, and tokens worse than the frame best by more
// than the beam width are dropped. The surviving token count per frame is
// the confidence signal consumed by the precision controller.

#ifndef DYNPREC_WFST_DECODER_H_
#define DYNPREC_WFST_DECODER_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "wfst/wfst.h"

namespace dynprec {
namespace wfst {

struct BeamConfig {
  double beam_width = 12.0;
  std::int32_t max_active = 0;  // 0 disables the cap
  double acoustic_scale = 1.0;

  void Validate() const;
};

struct DecodeResult {
  std::vector<std::int32_t> words;  // best-path output labels, epsilons removed
  std::vector<std::int64_t> frame_token_counts;
  double final_cost = kInfCost;
  bool reached_final = false;
};

class BeamSearch {
 public:
  BeamSearch(const Wfst &graph, const BeamConfig &cfg);

  // Places the start token at cost 0 and runs epsilon closure; no acoustic
  // input is consumed.
  void Init();

  // Advances the search by one frame. `scores` are per-senone log
  // probabilities; senone id s reads scores[s-1]. Throws DecodeError when
  // every hypothesis dies.
  void ExpandFrame(std::span<const double> scores);

  // Cardinality of the active set after pruning.
  std::int64_t TokenCount() const;

  // Sorted (state, cost) snapshot of the active set.
  std::vector<std::pair<std::int32_t, double>> ActiveStates() const;

  const std::vector<std::int64_t> &FrameTokenCounts() const { return counts_; }

  // Adds final costs, selects the best token and backtracks. If no active
  // token is in a final state the best non-final token is used and
  // reached_final is false.
  DecodeResult Finalize() const;

 private:
  struct Live {
    double cost = kInfCost;
    std::int32_t node = -1;     // arena index
    std::int32_t tie_src = -1;  // producing (source state, arc index),
    std::int32_t tie_arc = -1;  // for deterministic tie-breaking
  };
  struct Node {
    std::int32_t state = -1;
    double cost = 0.0;
    std::int32_t parent = -1;
    std::int32_t olabel = kEpsilon;
  };

  // Keeps the minimum-cost candidate per state; ties go to the lower source
  // state id, then the lower arc index. Returns whether the slot changed.
  bool Offer(std::int32_t dst, double cost, std::int32_t src, std::int32_t arc,
             std::int32_t parent_node, std::int32_t olabel);
  void EpsilonClosure();
  void Prune();

  const Wfst &graph_;
  BeamConfig cfg_;
  std::map<std::int32_t, Live> active_;  // ordered: deterministic iteration
  std::vector<Node> arena_;
  std::vector<std::int64_t> counts_;
};

}  // namespace wfst
}  // namespace dynprec

#endif  // DYNPREC_WFST_DECODER_H_
