// tests/test_controller.cc

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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "util/errors.h"
#include "util/rng.h"

using namespace dynprec;
using namespace dynprec::ctrl;

TEST_CASE("Decide uses a strict comparison at the threshold") {
  ControllerConfig cfg;
  cfg.initial_threshold = 1000;
  PrecisionController c(cfg);

  CHECK(c.Decide(999).mode == Precision::kHalf);
  CHECK(c.Decide(1000).mode == Precision::kBase);
  CHECK(c.Decide(0).mode == Precision::kHalf);
  CHECK(c.Decide(kNoPriorCount).mode == Precision::kBase);

  SUBCASE("Decide is pure") {
    const auto before_h = c.imbalance();
    const auto before_th = c.threshold();
    (void)c.Decide(1);
    (void)c.Decide(999999);
    CHECK(c.imbalance() == before_h);
    CHECK(c.threshold() == before_th);
    CHECK(c.frames_seen() == 0);
  }
}

TEST_CASE("Infinite threshold decides Half for everything") {
  ControllerConfig cfg;
  cfg.threshold_infinite = true;
  cfg.delta = 0;
  PrecisionController c(cfg);
  CHECK(c.Decide(0).mode == Precision::kHalf);
  CHECK(c.Decide(1'000'000).mode == Precision::kHalf);
  CHECK(c.Decide(kNoPriorCount).mode == Precision::kHalf);
}

TEST_CASE("ApplyThresholdUpdate implements the sign-agreement rule") {
  CHECK(ApplyThresholdUpdate(1000, 5, 2, 10) == 990);
  CHECK(ApplyThresholdUpdate(1000, -3, -1, 10) == 1010);
  CHECK(ApplyThresholdUpdate(1000, 5, -1, 10) == 1000);
  CHECK(ApplyThresholdUpdate(1000, -5, 1, 10) == 1000);
  CHECK(ApplyThresholdUpdate(1000, 0, 4, 10) == 1000);
  CHECK(ApplyThresholdUpdate(3, 9, 9, 10) == 0);  // clamped at zero
}

TEST_CASE("RecordAndUpdate bookkeeping") {
  ControllerConfig cfg;
  cfg.initial_threshold = 100;
  cfg.window = 4;
  cfg.update_period = 2;
  cfg.delta = 1;
  PrecisionController c(cfg);

  auto step = [&](std::int64_t count) {
    const auto d = c.Decide(count);
    c.RecordAndUpdate(d);
    return d;
  };

  // Two Half frames -> h = 2, h_l = 2 -> update fires at frame 2: Th 99.
  step(10);
  CHECK(c.threshold() == 100);  // period not yet elapsed
  step(10);
  CHECK(c.imbalance() == 2);
  CHECK(c.window_imbalance() == 2);
  CHECK(c.threshold() == 99);

  // h tracks (#half - #base) exactly; the window holds the last 4.
  step(1000);
  step(1000);
  CHECK(c.imbalance() == 0);
  CHECK(c.window_imbalance() == 0);
  step(1000);
  step(1000);
  CHECK(c.imbalance() == -2);
  CHECK(c.window_imbalance() == -4);  // last 4 frames were all Base
  CHECK(c.threshold() == 100);        // -2/-4 signs agree: +1 at frame 6
}

TEST_CASE("h equals the signed half/base count over any run") {
  ControllerConfig cfg;
  cfg.initial_threshold = 500;
  PrecisionController c(cfg);
  Rng rng(5);
  std::int64_t half = 0, base = 0;
  for (int i = 0; i < 5000; ++i) {
    const auto d = c.Decide(rng.UniformInt(0, 1000));
    c.RecordAndUpdate(d);
    (d.mode == Precision::kHalf ? half : base)++;
  }
  CHECK(c.imbalance() == half - base);
  CHECK(c.frames_seen() == 5000);
  CHECK(c.half_frames() == half);
}

TEST_CASE("RunStream on constant counts walks the threshold down") {
  // Constant count 900 under Th0=1000: every frame decides Half and every
  // update lowers Th by 1 until Th reaches the count, 100 updates later.
  ControllerConfig cfg;  // defaults: Th 1000, delta 1, period 8, window 64
  std::vector<std::int64_t> counts(4000, 900);
  const auto r = RunStream(counts, cfg);

  for (int i = 0; i < 800; ++i) {
    REQUIRE(r.decisions[i].mode == Precision::kHalf);
  }
  CHECK(r.threshold_trace[799] == 900);
  CHECK(r.decisions[800].mode == Precision::kBase);
  // Staircase: Th after frame 8k-1 is 1000-k during the descent.
  CHECK(r.threshold_trace[7] == 999);
  CHECK(r.threshold_trace[79] == 990);
  // After the descent the threshold stays pinned near the count.
  const auto lo = *std::min_element(r.threshold_trace.begin() + 800,
                                    r.threshold_trace.end());
  const auto hi = *std::max_element(r.threshold_trace.begin() + 800,
                                    r.threshold_trace.end());
  CHECK(lo >= 890);
  CHECK(hi <= 910);
}

TEST_CASE("RunStream converges to the target ratio on a stationary stream") {
  ControllerConfig cfg;
  Rng rng(42);
  std::vector<std::int64_t> counts(30000);
  for (auto &c : counts) c = rng.UniformInt(200, 1800);
  const auto r = RunStream(counts, cfg);
  CHECK(r.achieved_ratio > 0.47);
  CHECK(r.achieved_ratio < 0.53);

  SUBCASE("threshold trace stays in a narrow band") {
    const auto lo = *std::min_element(r.threshold_trace.begin(),
                                      r.threshold_trace.end());
    const auto hi = *std::max_element(r.threshold_trace.begin(),
                                      r.threshold_trace.end());
    CHECK(hi - lo < 300);  // token range spans 1600
  }
}

TEST_CASE("Non-half targets converge with weighted increments") {
  Rng rng(43);
  std::vector<std::int64_t> counts(60000);
  for (auto &c : counts) c = rng.UniformInt(0, 2000);
  for (double target : {0.25, 0.75}) {
    ControllerConfig cfg;
    cfg.target_ratio = target;
    const auto r = RunStream(counts, cfg);
    CHECK(std::fabs(r.achieved_ratio - target) < 0.03);
  }
}

TEST_CASE("RunStream rejects an empty stream") {
  ControllerConfig cfg;
  CHECK_THROWS_AS(RunStream({}, cfg), ValidationError);
}

TEST_CASE("Config validation") {
  ControllerConfig cfg;
  cfg.target_ratio = 1.5;
  CHECK_THROWS_AS(cfg.Validate(), ValidationError);
  cfg = {};
  cfg.delta = -1;
  CHECK_THROWS_AS(cfg.Validate(), ValidationError);
  cfg = {};
  cfg.window = 0;
  CHECK_THROWS_AS(cfg.Validate(), ValidationError);
  cfg = {};
  cfg.update_period = 0;
  CHECK_THROWS_AS(cfg.Validate(), ValidationError);
}
