// wfst/decoder.cc

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

#include "wfst/decoder.h"

#include <algorithm>
#include <cmath>

#include "util/errors.h"

namespace dynprec {
namespace wfst {

void BeamConfig::Validate() const {
  if (!(beam_width > 0.0)) {
    throw ValidationError("BeamConfig: beam_width must be > 0");
  }
  if (max_active < 0) {
    throw ValidationError("BeamConfig: max_active must be >= 0");
  }
  if (!(acoustic_scale > 0.0)) {
    throw ValidationError("BeamConfig: acoustic_scale must be > 0");
  }
}

BeamSearch::BeamSearch(const Wfst &graph, const BeamConfig &cfg)
    : graph_(graph), cfg_(cfg) {
  cfg_.Validate();
}

bool BeamSearch::Offer(std::int32_t dst, double cost, std::int32_t src,
                       std::int32_t arc, std::int32_t parent_node,
                       std::int32_t olabel) {
  Live &slot = active_[dst];
  const bool better =
      cost < slot.cost ||
      (cost == slot.cost &&
       (src < slot.tie_src || (src == slot.tie_src && arc < slot.tie_arc)));
  if (!better) return false;
  slot.cost = cost;
  slot.tie_src = src;
  slot.tie_arc = arc;
  if (slot.node < 0) {
    slot.node = static_cast<std::int32_t>(arena_.size());
    arena_.push_back(Node{dst, cost, parent_node, olabel});
  } else {
    Node &n = arena_[slot.node];
    n.cost = cost;
    n.parent = parent_node;
    n.olabel = olabel;
  }
  return true;
}

void BeamSearch::Init() {
  active_.clear();
  arena_.clear();
  counts_.clear();
  arena_.push_back(Node{graph_.start, 0.0, -1, kEpsilon});
  active_[graph_.start] = Live{0.0, 0, -1, -1};
  EpsilonClosure();
}

void BeamSearch::EpsilonClosure() {
  // Cost-improvement relaxation to a fixpoint, with the pass count capped by
  // the state count (Bellman-Ford bound) so epsilon cycles terminate.
  const std::int32_t max_passes = graph_.NumStates();
  for (std::int32_t pass = 0; pass < max_passes; ++pass) {
    bool changed = false;
    std::vector<std::pair<std::int32_t, std::int32_t>> snapshot;
    snapshot.reserve(active_.size());
    for (const auto &[state, live] : active_) snapshot.emplace_back(state, live.node);
    for (const auto &[state, node] : snapshot) {
      const auto &arcs = graph_.arcs[state];
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        const Arc &a = arcs[i];
        if (a.ilabel != kEpsilon) continue;
        const double cand = arena_[node].cost + a.cost;
        changed |= Offer(a.dst, cand, state, static_cast<std::int32_t>(i), node,
                         a.olabel);
      }
    }
    if (!changed) break;
  }
}

void BeamSearch::Prune() {
  double best = kInfCost;
  for (const auto &[state, live] : active_) best = std::min(best, live.cost);
  const double cutoff = best + cfg_.beam_width;
  for (auto it = active_.begin(); it != active_.end();) {
    if (it->second.cost > cutoff) {
      it = active_.erase(it);
    } else {
      ++it;
    }
  }
  if (cfg_.max_active > 0 &&
      static_cast<std::int32_t>(active_.size()) > cfg_.max_active) {
    std::vector<std::pair<double, std::int32_t>> order;
    order.reserve(active_.size());
    for (const auto &[state, live] : active_) order.emplace_back(live.cost, state);
    std::sort(order.begin(), order.end());
    for (std::size_t i = cfg_.max_active; i < order.size(); ++i) {
      active_.erase(order[i].second);
    }
  }
}

void BeamSearch::ExpandFrame(std::span<const double> scores) {
  if (active_.empty()) {
    throw DecodeError("ExpandFrame: empty active set (call Init first)");
  }
  if (static_cast<std::int32_t>(scores.size()) != graph_.max_ilabel) {
    throw ValidationError(
        "ExpandFrame: score vector length does not match the graph's senone "
        "alphabet");
  }

  const auto previous = std::move(active_);
  active_.clear();
  for (const auto &[state, live] : previous) {
    const auto &arcs = graph_.arcs[state];
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      const Arc &a = arcs[i];
      if (a.ilabel == kEpsilon) continue;
      const double acoustic = -scores[a.ilabel - 1] * cfg_.acoustic_scale;
      const double cand = live.cost + a.cost + acoustic;
      Offer(a.dst, cand, state, static_cast<std::int32_t>(i), live.node,
            a.olabel);
    }
  }
  EpsilonClosure();
  Prune();
  if (active_.empty()) {
    throw DecodeError("beam search died: no surviving tokens for this frame");
  }
  counts_.push_back(static_cast<std::int64_t>(active_.size()));
}

std::int64_t BeamSearch::TokenCount() const {
  return static_cast<std::int64_t>(active_.size());
}

std::vector<std::pair<std::int32_t, double>> BeamSearch::ActiveStates() const {
  std::vector<std::pair<std::int32_t, double>> out;
  out.reserve(active_.size());
  for (const auto &[state, live] : active_) out.emplace_back(state, live.cost);
  return out;
}

DecodeResult BeamSearch::Finalize() const {
  if (active_.empty()) throw DecodeError("Finalize: no active tokens");

  std::int32_t best_state = -1;
  double best_total = kInfCost;
  bool have_final = false;
  for (const auto &[state, live] : active_) {
    if (!graph_.IsFinal(state)) continue;
    const double total = live.cost + graph_.final_cost[state];
    if (total < best_total) {
      best_total = total;
      best_state = state;
      have_final = true;
    }
  }
  if (!have_final) {
    for (const auto &[state, live] : active_) {
      if (live.cost < best_total) {
        best_total = live.cost;
        best_state = state;
      }
    }
  }

  DecodeResult result;
  result.reached_final = have_final;
  result.final_cost = best_total;
  result.frame_token_counts = counts_;
  for (std::int32_t node = active_.at(best_state).node; node >= 0;
       node = arena_[node].parent) {
    if (arena_[node].olabel != kEpsilon) {
      result.words.push_back(arena_[node].olabel);
    }
  }
  std::reverse(result.words.begin(), result.words.end());
  return result;
}

}  // namespace wfst
}  // namespace dynprec
