// ctrl/controller.cc

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

#include "ctrl/controller.h"

#include <cmath>
#include <numeric>

#include "util/errors.h"

namespace dynprec {
namespace ctrl {

void ControllerConfig::Validate() const {
  if (!(target_ratio >= 0.0 && target_ratio <= 1.0)) {
    throw ValidationError("ControllerConfig: target_ratio must be in [0, 1]");
  }
  // delta 0 freezes the threshold; used by the degenerate fixed policies.
  if (delta < 0) throw ValidationError("ControllerConfig: delta must be >= 0");
  if (window < 1) throw ValidationError("ControllerConfig: window must be >= 1");
  if (update_period < 1) {
    throw ValidationError("ControllerConfig: update_period must be >= 1");
  }
  if (initial_threshold < 0) {
    throw ValidationError("ControllerConfig: initial_threshold must be >= 0");
  }
}

std::int64_t ApplyThresholdUpdate(std::int64_t th, std::int64_t h,
                                  std::int64_t h_l, std::int64_t delta) {
  if (h > 0 && h_l > 0) {
    th -= delta;
  } else if (h < 0 && h_l < 0) {
    th += delta;
  }
  return th < 0 ? 0 : th;
}

PrecisionController::PrecisionController(const ControllerConfig &cfg)
    : cfg_(cfg), th_(cfg.initial_threshold), ring_(cfg.window, 0) {
  cfg_.Validate();
  // Integer increments with inc_half/inc_base = (1-r)/r, so the expected h
  // drift is zero exactly at the target ratio. Resolution 1/1000.
  const auto scaled = [](double x) {
    return static_cast<std::int64_t>(std::llround(x * 1000.0));
  };
  inc_half_ = scaled(1.0 - cfg_.target_ratio);
  inc_base_ = scaled(cfg_.target_ratio);
  const std::int64_t g = std::gcd(inc_half_, inc_base_);
  if (g > 1) {
    inc_half_ /= g;
    inc_base_ /= g;
  }
}

Decision PrecisionController::Decide(std::int64_t token_count) const {
  Decision d;
  d.token_count_observed = token_count;
  if (cfg_.threshold_infinite) {
    d.mode = Precision::kHalf;
    d.threshold_at_decision = std::numeric_limits<std::int64_t>::max();
  } else {
    d.threshold_at_decision = th_;
    d.mode = token_count < th_ ? Precision::kHalf : Precision::kBase;
  }
  return d;
}

void PrecisionController::RecordAndUpdate(const Decision &d) {
  const std::int64_t inc =
      d.mode == Precision::kHalf ? inc_half_ : -inc_base_;
  h_ += inc;
  ++frames_;
  if (d.mode == Precision::kHalf) ++half_frames_;

  if (ring_fill_ == cfg_.window) {
    h_l_ -= ring_[ring_pos_];
  } else {
    ++ring_fill_;
  }
  ring_[ring_pos_] = inc;
  h_l_ += inc;
  ring_pos_ = (ring_pos_ + 1) % cfg_.window;

  if (++frames_since_update_ >= cfg_.update_period) {
    frames_since_update_ = 0;
    if (!cfg_.threshold_infinite) {
      th_ = ApplyThresholdUpdate(th_, h_, h_l_, cfg_.delta);
    }
  }
}

StreamResult RunStream(std::span<const std::int64_t> token_counts,
                       const ControllerConfig &cfg) {
  if (token_counts.empty()) {
    throw ValidationError("RunStream: empty token-count stream");
  }
  PrecisionController controller(cfg);
  StreamResult result;
  result.decisions.reserve(token_counts.size());
  result.threshold_trace.reserve(token_counts.size());
  std::int64_t half = 0;
  for (const std::int64_t count : token_counts) {
    const Decision d = controller.Decide(count);
    controller.RecordAndUpdate(d);
    if (d.mode == Precision::kHalf) ++half;
    result.decisions.push_back(d);
    result.threshold_trace.push_back(controller.threshold());
  }
  result.achieved_ratio =
      static_cast<double>(half) / static_cast<double>(token_counts.size());
  return result;
}

}  // namespace ctrl
}  // namespace dynprec
