// ctrl/controller.h

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

// Run-time precision policy. A frame is evaluated at half precision when the
// previous search step expanded fewer tokens than the threshold Th. Th is
// adjusted at run time from two imbalance counters so that a target fraction
// of frames lands at half precision:
//
//   h   cumulative (half - base) frame imbalance, never reset
//   h_l the same imbalance over a recent window
//   every update_period frames:
//     Th -= delta   if h > 0 and h_l > 0
//     Th += delta   if h < 0 and h_l < 0
//
// All controller arithmetic is integer. Targets other than 1/2 use weighted
// increments (+(1-r) / -r, scaled to integers); at r = 1/2 this reduces to
// the plain +/-1 scheme.

#ifndef DYNPREC_CTRL_CONTROLLER_H_
#define DYNPREC_CTRL_CONTROLLER_H_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "arith/nfu.h"

namespace dynprec {
namespace ctrl {

using arith::Precision;

// Passed to Decide when no previous-frame token count exists (stream start):
// no finite threshold classifies it as confident, so the decision falls back
// to base precision.
inline constexpr std::int64_t kNoPriorCount =
    std::numeric_limits<std::int64_t>::max();

struct ControllerConfig {
  double target_ratio = 0.5;
  std::int64_t delta = 1;
  int window = 64;
  int update_period = 8;
  std::int64_t initial_threshold = 1000;
  // Degenerate all-half policy (notionally Th = infinity). Decide returns
  // Half for every count, including kNoPriorCount.
  bool threshold_infinite = false;

  void Validate() const;
};

struct Decision {
  Precision mode = Precision::kBase;
  std::int64_t threshold_at_decision = 0;
  std::int64_t token_count_observed = 0;
};

// Eq-style threshold update with the sign-agreement gate; clamps at zero.
std::int64_t ApplyThresholdUpdate(std::int64_t th, std::int64_t h,
                                  std::int64_t h_l, std::int64_t delta);

class PrecisionController {
 public:
  explicit PrecisionController(const ControllerConfig &cfg);

  // Pure: does not mutate state. Half iff token_count < Th (strict).
  Decision Decide(std::int64_t token_count) const;

  // Books the decision into h and the window, and applies the threshold
  // update when the period elapses.
  void RecordAndUpdate(const Decision &d);

  std::int64_t threshold() const { return th_; }
  bool threshold_is_infinite() const { return cfg_.threshold_infinite; }
  std::int64_t imbalance() const { return h_; }
  std::int64_t window_imbalance() const { return h_l_; }
  std::int64_t frames_seen() const { return frames_; }
  std::int64_t half_frames() const { return half_frames_; }

  const ControllerConfig &config() const { return cfg_; }

 private:
  ControllerConfig cfg_;
  std::int64_t th_;
  std::int64_t h_ = 0;
  std::int64_t h_l_ = 0;
  std::vector<std::int64_t> ring_;
  int ring_pos_ = 0;
  int ring_fill_ = 0;
  int frames_since_update_ = 0;
  std::int64_t frames_ = 0;
  std::int64_t half_frames_ = 0;
  std::int64_t inc_half_ = 1;  // added to h on a Half frame
  std::int64_t inc_base_ = 1;  // subtracted from h on a Base frame
};

struct StreamResult {
  std::vector<Decision> decisions;
  std::vector<std::int64_t> threshold_trace;  // Th after each frame's update
  double achieved_ratio = 0.0;
};

// Folds Decide + RecordAndUpdate over a token-count stream: each count is
// classified against the current threshold, then booked.
StreamResult RunStream(std::span<const std::int64_t> token_counts,
                       const ControllerConfig &cfg);

}  // namespace ctrl
}  // namespace dynprec

#endif  // DYNPREC_CTRL_CONTROLLER_H_
