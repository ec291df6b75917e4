// tests/test_cost.cc

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

#include "cost/cost_model.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "util/errors.h"

using namespace dynprec;
using namespace dynprec::cost;
using arith::Precision;

namespace {
// Reference average tokens/frame assumed by the default beam calibration.
constexpr std::int64_t kRefTokens = 70;
}  // namespace

TEST_CASE("AmFrameCost") {
  const HwConfig hw;
  hw.Validate();
  const auto base = AmFrameCost(hw.am_model_bytes, Precision::kBase, hw);
  const auto half = AmFrameCost(hw.am_model_bytes, Precision::kHalf, hw);

  SUBCASE("half mode takes about half the time") {
    const double ratio = half.time_s / base.time_s;
    CHECK(ratio >= 0.50);
    CHECK(ratio <= 0.52);
  }
  SUBCASE("memory bound in both modes") {
    for (auto mode : {Precision::kBase, Precision::kHalf}) {
      const auto c = AmFrameCost(hw.am_model_bytes, mode, hw);
      const double t_mem =
          c.dram_read_bytes / (hw.dram_bandwidth_bytes_per_s * hw.dram_efficiency);
      CHECK(c.time_s == t_mem);  // max() picked the memory side
      const double t_compute = hw.am_model_bytes /
                               (hw.nfu_base_macs_per_cycle *
                                (mode == Precision::kHalf ? 2.0 : 1.0)) /
                               hw.dnn_freq_hz;
      CHECK(t_mem >= t_compute);
    }
  }
  SUBCASE("DRAM takes about 85% of AM energy") {
    const double share = base.energy_j[kCompDram] / base.TotalEnergy();
    CHECK(share > 0.83);
    CHECK(share < 0.87);
  }
  SUBCASE("halving bytes halves the weight traffic") {
    CHECK(half.dram_read_bytes == base.dram_read_bytes / 2);
  }
  SUBCASE("non-positive model size rejected") {
    CHECK_THROWS_AS(AmFrameCost(0, Precision::kBase, hw), ValidationError);
  }
}

TEST_CASE("BeamFrameCost") {
  const HwConfig hw;
  SUBCASE("zero tokens cost nothing") {
    const auto c = BeamFrameCost(0, hw);
    CHECK(c.time_s == 0.0);
    CHECK(c.TotalEnergy() == 0.0);
  }
  SUBCASE("doubling tokens doubles time and dynamic energy") {
    const auto one = BeamFrameCost(500, hw);
    const auto two = BeamFrameCost(1000, hw);
    CHECK(two.time_s == doctest::Approx(2.0 * one.time_s).epsilon(1e-12));
    CHECK(two.TotalEnergy() ==
          doctest::Approx(2.0 * one.TotalEnergy()).epsilon(1e-12));
  }
  SUBCASE("negative tokens rejected") {
    CHECK_THROWS_AS(BeamFrameCost(-1, hw), ValidationError);
  }
}

TEST_CASE("Default calibration reproduces the breakdown shares") {
  const HwConfig hw;
  const CostLedger frame = FrameCost(Precision::kBase, kRefTokens, hw);

  const double t = frame.TotalTime();
  const double e = frame.TotalEnergy();

  // Time: AM 82%, front-end 14.8%, beam search 3.2%.
  CHECK(100.0 * frame.StageTime(kStageAm) / t == doctest::Approx(82.0).epsilon(0.02));
  CHECK(100.0 * (frame.StageTime(kStageFeature) + frame.StageTime(kStageIvector)) /
            t ==
        doctest::Approx(14.8).epsilon(0.02));
  CHECK(100.0 * frame.StageTime(kStageBeam) / t ==
        doctest::Approx(3.2).epsilon(0.05));

  // Energy: AM 68.3%, iVector 28.9%; about 0.7 mJ per frame in total.
  CHECK(100.0 * frame.StageEnergy(kStageAm) / e ==
        doctest::Approx(68.3).epsilon(0.02));
  CHECK(100.0 * frame.StageEnergy(kStageIvector) / e ==
        doctest::Approx(28.9).epsilon(0.02));
  CHECK(e == doctest::Approx(0.7e-3).epsilon(0.03));
}

TEST_CASE("Ledger aggregation") {
  const HwConfig hw;
  std::vector<CostLedger> frames;
  for (int i = 0; i < 40; ++i) {
    frames.push_back(FrameCost(i % 2 == 0 ? Precision::kBase : Precision::kHalf,
                               100 + i, hw));
  }
  const CostLedger total = UtteranceCost(frames);
  CHECK(total.frames == 40);
  CHECK(total.half_frames == 20);

  SUBCASE("conservation: total equals the running sum of parts") {
    CostLedger again;
    for (const auto &f : frames) again.Add(f);
    CHECK(again.TotalTime() == total.TotalTime());
    CHECK(again.TotalEnergy() == total.TotalEnergy());
    CHECK(again.dram_weight_bytes == total.dram_weight_bytes);
  }
  SUBCASE("stage and component decompositions agree") {
    double by_stage = 0.0, by_component = 0.0;
    for (int s = 0; s < kNumStages; ++s) {
      by_stage += total.StageEnergy(static_cast<Stage>(s));
    }
    for (int c = 0; c < kNumComponents; ++c) {
      by_component += total.ComponentEnergy(static_cast<Component>(c));
    }
    CHECK(by_stage == doctest::Approx(by_component).epsilon(1e-12));
  }
}

TEST_CASE("AM savings scale linearly with the half fraction") {
  const HwConfig hw;
  auto ledger_with_ratio = [&](int half_of_100) {
    std::vector<CostLedger> frames;
    for (int i = 0; i < 100; ++i) {
      frames.push_back(FrameCost(
          i < half_of_100 ? Precision::kHalf : Precision::kBase, 150, hw));
    }
    return UtteranceCost(frames);
  };

  const auto at50 = ComputeAmSavings(ledger_with_ratio(50), hw);
  const auto at100 = ComputeAmSavings(ledger_with_ratio(100), hw);
  CHECK(at50.time_pct == doctest::Approx(25.0).epsilon(0.01));
  CHECK(at50.energy_pct == doctest::Approx(25.0).epsilon(0.01));
  CHECK(at100.time_pct == doctest::Approx(2.0 * at50.time_pct).epsilon(0.01));
  CHECK(at100.energy_pct == doctest::Approx(2.0 * at50.energy_pct).epsilon(0.01));

  SUBCASE("monotone: more half frames never cost more") {
    double prev_time = 1e18, prev_energy = 1e18;
    for (int h : {0, 25, 50, 75, 100}) {
      const auto led = ledger_with_ratio(h);
      CHECK(led.StageTime(kStageAm) <= prev_time);
      CHECK(led.StageEnergy(kStageAm) <= prev_energy);
      prev_time = led.StageTime(kStageAm);
      prev_energy = led.StageEnergy(kStageAm);
    }
  }
}

TEST_CASE("System savings against a measured baseline") {
  const HwConfig hw;
  std::vector<CostLedger> base_frames(200, FrameCost(Precision::kBase, 150, hw));
  const auto baseline = UtteranceCost(base_frames);

  std::vector<CostLedger> tech_frames;
  for (int i = 0; i < 200; ++i) {
    tech_frames.push_back(FrameCost(
        i % 2 == 0 ? Precision::kHalf : Precision::kBase, i % 2 == 0 ? 190 : 150,
        hw));
  }
  const auto technique = UtteranceCost(tech_frames);
  const auto sys = ComputeSystemSavings(technique, baseline);
  CHECK(sys.time_pct > 10.0);
  CHECK(sys.time_pct < 25.0);
  CHECK(sys.energy_pct > 10.0);
  CHECK(sys.energy_pct < 20.0);
}

TEST_CASE("Calibration file round-trip and validation") {
  const auto dir = std::filesystem::temp_directory_path() / "dynprec_cost_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "calibration.json").string();

  HwConfig hw;
  hw.bs_cycles_per_token = 300.0;
  hw.am_model_bytes = 1 << 20;
  SaveCalibration(hw, path);
  const HwConfig back = LoadCalibration(path);
  CHECK(back.bs_cycles_per_token == 300.0);
  CHECK(back.am_model_bytes == 1 << 20);
  CHECK(back.dnn_freq_hz == hw.dnn_freq_hz);

  SUBCASE("partial files override only the given keys") {
    const std::string partial = (dir / "partial.json").string();
    std::ofstream(partial) << "{\"dram_efficiency\": 0.9}\n";
    const HwConfig p = LoadCalibration(partial);
    CHECK(p.dram_efficiency == 0.9);
    CHECK(p.am_model_bytes == HwConfig{}.am_model_bytes);
  }
  SUBCASE("unknown keys rejected") {
    const std::string bad = (dir / "bad.json").string();
    std::ofstream(bad) << "{\"dram_efficciency\": 0.9}\n";
    CHECK_THROWS_AS(LoadCalibration(bad), ValidationError);
  }
  SUBCASE("non-JSON rejected") {
    const std::string garbage = (dir / "garbage.json").string();
    std::ofstream(garbage) << "not json at all\n";
    CHECK_THROWS_AS(LoadCalibration(garbage), ValidationError);
  }
  SUBCASE("negative constants rejected") {
    const std::string neg = (dir / "neg.json").string();
    std::ofstream(neg) << "{\"cpu_idle_power_w\": -1.0}\n";
    CHECK_THROWS_AS(LoadCalibration(neg), ValidationError);
  }
}
