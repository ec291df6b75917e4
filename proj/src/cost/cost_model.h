// cost/cost_model.h

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

// Analytic per-frame time/energy model of the platform: DRAM, DNN
// accelerator, beam-search accelerator and CPU front-end constants. The
// acoustic-model stage is memory bound (weight fetches dominate), so a
// half-precision frame moves half the bytes and takes half the time. Every
// constant is overridable through the calibration file; the defaults are
// solved from the published breakdown shares (see docs/calibration.md).

#ifndef DYNPREC_COST_COST_MODEL_H_
#define DYNPREC_COST_COST_MODEL_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "arith/nfu.h"

namespace dynprec {
namespace cost {

enum Stage : int {
  kStageFeature = 0,
  kStageIvector = 1,
  kStageAm = 2,
  kStageBeam = 3,
  kNumStages = 4,
};
const char *StageName(int stage);

enum Component : int {
  kCompDram = 0,
  kCompDnn = 1,
  kCompBs = 2,
  kCompCpu = 3,
  kNumComponents = 4,
};
const char *ComponentName(int component);

struct HwConfig {
  // Acoustic model traffic. The byte count is a model parameter, not tied
  // to the toy network actually scored, so paper-scale traffic can be
  // simulated at desk scale.
  std::int64_t am_model_bytes = 16777216;  // 8-bit plane, 16 MiB
  double am_output_bytes = 6056.0;         // score write-back per frame

  double dram_bandwidth_bytes_per_s = 16.0e9;
  double dram_efficiency = 0.87;  // sustained fraction of peak
  double dram_read_energy_j_per_byte = 2.4222e-11;
  double dram_write_energy_j_per_byte = 2.4222e-11;

  double dnn_freq_hz = 55.0e6;
  double nfu_base_macs_per_cycle = 256.0;  // Tn x Tn; half mode doubles this
  double dnn_active_power_w = 0.01150;
  double dnn_static_power_w = 0.002;

  double bs_freq_hz = 600.0e6;
  double bs_cycles_per_token = 403.15;
  double bs_energy_per_token_j = 9.013e-8;
  double bs_bytes_per_token = 200.0;
  double bs_static_power_w = 0.008;

  double cpu_idle_power_w = 0.040;

  double feature_time_s_per_frame = 7.613724e-5;
  double feature_energy_cpu_j_per_frame = 5.3e-6;
  double feature_energy_dnn_j_per_frame = 5.3e-6;
  double ivector_time_s_per_frame = 1.414477e-4;
  double ivector_energy_cpu_j_per_frame = 1.6184e-4;
  double ivector_energy_dnn_j_per_frame = 4.046e-5;

  void Validate() const;
};

// Calibration file: a flat JSON object whose keys match the HwConfig field
// names above. Any subset of keys may be given; the rest keep defaults.
// Unknown keys are rejected.
HwConfig LoadCalibration(const std::string &path);
void SaveCalibration(const HwConfig &hw, const std::string &path);

// Cost of one pipeline stage of one frame.
struct StageCost {
  double time_s = 0.0;
  std::array<double, kNumComponents> energy_j{};
  double dram_read_bytes = 0.0;
  double dram_write_bytes = 0.0;

  double TotalEnergy() const;
};

// Acoustic-model evaluation: weight transfer at full or half byte count,
// bounded below by compute throughput (never binding under the default,
// memory-bound calibration).
StageCost AmFrameCost(std::int64_t model_bytes_base, arith::Precision mode,
                      const HwConfig &hw);

// Beam search: linear in the tokens expanded.
StageCost BeamFrameCost(std::int64_t tokens, const HwConfig &hw);

// Front-end constants.
StageCost FeatureFrameCost(const HwConfig &hw);
StageCost IvectorFrameCost(const HwConfig &hw);

// Stage x component accounting; merged associatively.
struct CostLedger {
  std::array<double, kNumStages> time_s{};
  std::array<std::array<double, kNumComponents>, kNumStages> energy_j{};
  double dram_weight_bytes = 0.0;
  double dram_other_bytes = 0.0;
  std::int64_t frames = 0;
  std::int64_t half_frames = 0;

  void AddStage(Stage stage, const StageCost &c, bool weight_traffic = false);
  void Add(const CostLedger &other);

  double StageTime(Stage s) const { return time_s[s]; }
  double StageEnergy(Stage s) const;
  double ComponentEnergy(Component c) const;
  double TotalTime() const;
  double TotalEnergy() const;
};

// Books one decoded frame: front-end constants + AM at the given precision +
// beam search over the expanded tokens.
CostLedger FrameCost(arith::Precision mode, std::int64_t tokens,
                     const HwConfig &hw);

// Sums per-frame entries; the ledger invariantly equals the running total of
// its parts.
CostLedger UtteranceCost(const std::vector<CostLedger> &frame_entries);

struct AmSavings {
  double time_pct = 0.0;
  double energy_pct = 0.0;
};

// AM-stage saving of a ledger against the implied all-base-precision
// evaluation of the same frames.
AmSavings ComputeAmSavings(const CostLedger &led, const HwConfig &hw);

struct SystemSavings {
  double time_pct = 0.0;
  double energy_pct = 0.0;
};

// Whole-pipeline saving against a measured baseline run.
SystemSavings ComputeSystemSavings(const CostLedger &technique,
                                   const CostLedger &baseline);

}  // namespace cost
}  // namespace dynprec

#endif  // DYNPREC_COST_COST_MODEL_H_
