// cost/cost_model.cc

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

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "util/errors.h"

namespace dynprec {
namespace cost {

namespace {

using nlohmann::json;

// Field table shared by load/save so the two cannot drift apart.
struct Field {
  const char *key;
  double HwConfig::*member;
};

constexpr Field kDoubleFields[] = {
    {"am_output_bytes", &HwConfig::am_output_bytes},
    {"dram_bandwidth_bytes_per_s", &HwConfig::dram_bandwidth_bytes_per_s},
    {"dram_efficiency", &HwConfig::dram_efficiency},
    {"dram_read_energy_j_per_byte", &HwConfig::dram_read_energy_j_per_byte},
    {"dram_write_energy_j_per_byte", &HwConfig::dram_write_energy_j_per_byte},
    {"dnn_freq_hz", &HwConfig::dnn_freq_hz},
    {"nfu_base_macs_per_cycle", &HwConfig::nfu_base_macs_per_cycle},
    {"dnn_active_power_w", &HwConfig::dnn_active_power_w},
    {"dnn_static_power_w", &HwConfig::dnn_static_power_w},
    {"bs_freq_hz", &HwConfig::bs_freq_hz},
    {"bs_cycles_per_token", &HwConfig::bs_cycles_per_token},
    {"bs_energy_per_token_j", &HwConfig::bs_energy_per_token_j},
    {"bs_bytes_per_token", &HwConfig::bs_bytes_per_token},
    {"bs_static_power_w", &HwConfig::bs_static_power_w},
    {"cpu_idle_power_w", &HwConfig::cpu_idle_power_w},
    {"feature_time_s_per_frame", &HwConfig::feature_time_s_per_frame},
    {"feature_energy_cpu_j_per_frame", &HwConfig::feature_energy_cpu_j_per_frame},
    {"feature_energy_dnn_j_per_frame", &HwConfig::feature_energy_dnn_j_per_frame},
    {"ivector_time_s_per_frame", &HwConfig::ivector_time_s_per_frame},
    {"ivector_energy_cpu_j_per_frame", &HwConfig::ivector_energy_cpu_j_per_frame},
    {"ivector_energy_dnn_j_per_frame", &HwConfig::ivector_energy_dnn_j_per_frame},
};

double EffectiveBandwidth(const HwConfig &hw) {
  return hw.dram_bandwidth_bytes_per_s * hw.dram_efficiency;
}

}  // namespace

const char *StageName(int stage) {
  static const char *kNames[kNumStages] = {"feature", "ivector", "am", "beam"};
  return kNames[stage];
}

const char *ComponentName(int component) {
  static const char *kNames[kNumComponents] = {"dram", "dnn_accel", "bs_accel",
                                               "cpu"};
  return kNames[component];
}

void HwConfig::Validate() const {
  if (am_model_bytes <= 0) {
    throw ValidationError("HwConfig: am_model_bytes must be positive");
  }
  const double positives[] = {
      am_output_bytes,         dram_bandwidth_bytes_per_s,
      dram_efficiency,         dram_read_energy_j_per_byte,
      dram_write_energy_j_per_byte, dnn_freq_hz,
      nfu_base_macs_per_cycle, dnn_active_power_w,
      dnn_static_power_w,      bs_freq_hz,
      bs_cycles_per_token,     bs_energy_per_token_j,
      bs_bytes_per_token,      bs_static_power_w,
      cpu_idle_power_w,        feature_time_s_per_frame,
      feature_energy_cpu_j_per_frame, feature_energy_dnn_j_per_frame,
      ivector_time_s_per_frame, ivector_energy_cpu_j_per_frame,
      ivector_energy_dnn_j_per_frame,
  };
  for (double v : positives) {
    if (!(v > 0.0)) {
      throw ValidationError("HwConfig: all constants must be positive");
    }
  }
  if (dram_efficiency > 1.0) {
    throw ValidationError("HwConfig: dram_efficiency must be <= 1");
  }
}

HwConfig LoadCalibration(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open calibration file: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception &e) {
    throw ValidationError("calibration file is not valid JSON: " +
                          std::string(e.what()));
  }
  if (!j.is_object()) {
    throw ValidationError("calibration file must hold a JSON object");
  }

  HwConfig hw;
  for (const auto &[key, value] : j.items()) {
    if (key == "am_model_bytes") {
      if (!value.is_number()) {
        throw ValidationError("calibration: am_model_bytes must be a number");
      }
      hw.am_model_bytes = value.get<std::int64_t>();
      continue;
    }
    bool known = false;
    for (const Field &f : kDoubleFields) {
      if (key == f.key) {
        if (!value.is_number()) {
          throw ValidationError("calibration: " + key + " must be a number");
        }
        hw.*(f.member) = value.get<double>();
        known = true;
        break;
      }
    }
    if (!known) {
      throw ValidationError("calibration: unknown key '" + key + "'");
    }
  }
  hw.Validate();
  return hw;
}

void SaveCalibration(const HwConfig &hw, const std::string &path) {
  json j;
  j["am_model_bytes"] = hw.am_model_bytes;
  for (const Field &f : kDoubleFields) j[f.key] = hw.*(f.member);
  std::ofstream os(path);
  if (!os) throw IoError("cannot open calibration file for writing: " + path);
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failure on calibration file: " + path);
}

double StageCost::TotalEnergy() const {
  double e = 0.0;
  for (double v : energy_j) e += v;
  return e;
}

StageCost AmFrameCost(std::int64_t model_bytes_base, arith::Precision mode,
                      const HwConfig &hw) {
  if (model_bytes_base <= 0) {
    throw ValidationError("AmFrameCost: model_bytes_base must be positive");
  }
  const bool half = mode == arith::Precision::kHalf;
  const double bytes = half ? model_bytes_base * 0.5
                            : static_cast<double>(model_bytes_base);
  // One MAC per base-plane weight; half mode doubles the per-cycle rate.
  const double macs = static_cast<double>(model_bytes_base);
  const double macs_per_cycle =
      hw.nfu_base_macs_per_cycle * (half ? 2.0 : 1.0);

  const double t_mem = bytes / EffectiveBandwidth(hw);
  const double t_compute = macs / macs_per_cycle / hw.dnn_freq_hz;

  StageCost c;
  c.time_s = std::max(t_mem, t_compute);
  c.dram_read_bytes = bytes;
  c.dram_write_bytes = hw.am_output_bytes;
  c.energy_j[kCompDram] = bytes * hw.dram_read_energy_j_per_byte +
                          hw.am_output_bytes * hw.dram_write_energy_j_per_byte;
  c.energy_j[kCompDnn] = hw.dnn_active_power_w * c.time_s;
  c.energy_j[kCompBs] = hw.bs_static_power_w * c.time_s;
  c.energy_j[kCompCpu] = hw.cpu_idle_power_w * c.time_s;
  return c;
}

StageCost BeamFrameCost(std::int64_t tokens, const HwConfig &hw) {
  if (tokens < 0) throw ValidationError("BeamFrameCost: negative token count");
  StageCost c;
  const double n = static_cast<double>(tokens);
  c.time_s = n * hw.bs_cycles_per_token / hw.bs_freq_hz;
  c.dram_read_bytes = n * hw.bs_bytes_per_token;
  c.energy_j[kCompDram] = c.dram_read_bytes * hw.dram_read_energy_j_per_byte;
  c.energy_j[kCompBs] =
      n * hw.bs_energy_per_token_j + hw.bs_static_power_w * c.time_s;
  c.energy_j[kCompDnn] = hw.dnn_static_power_w * c.time_s;
  c.energy_j[kCompCpu] = hw.cpu_idle_power_w * c.time_s;
  return c;
}

StageCost FeatureFrameCost(const HwConfig &hw) {
  StageCost c;
  c.time_s = hw.feature_time_s_per_frame;
  c.energy_j[kCompCpu] = hw.feature_energy_cpu_j_per_frame;
  c.energy_j[kCompDnn] = hw.feature_energy_dnn_j_per_frame;
  return c;
}

StageCost IvectorFrameCost(const HwConfig &hw) {
  StageCost c;
  c.time_s = hw.ivector_time_s_per_frame;
  c.energy_j[kCompCpu] = hw.ivector_energy_cpu_j_per_frame;
  c.energy_j[kCompDnn] = hw.ivector_energy_dnn_j_per_frame;
  return c;
}

void CostLedger::AddStage(Stage stage, const StageCost &c,
                          bool weight_traffic) {
  time_s[stage] += c.time_s;
  for (int k = 0; k < kNumComponents; ++k) {
    energy_j[stage][k] += c.energy_j[k];
  }
  if (weight_traffic) {
    dram_weight_bytes += c.dram_read_bytes;
    dram_other_bytes += c.dram_write_bytes;
  } else {
    dram_other_bytes += c.dram_read_bytes + c.dram_write_bytes;
  }
}

void CostLedger::Add(const CostLedger &other) {
  for (int s = 0; s < kNumStages; ++s) {
    time_s[s] += other.time_s[s];
    for (int k = 0; k < kNumComponents; ++k) {
      energy_j[s][k] += other.energy_j[s][k];
    }
  }
  dram_weight_bytes += other.dram_weight_bytes;
  dram_other_bytes += other.dram_other_bytes;
  frames += other.frames;
  half_frames += other.half_frames;
}

double CostLedger::StageEnergy(Stage s) const {
  double e = 0.0;
  for (int k = 0; k < kNumComponents; ++k) e += energy_j[s][k];
  return e;
}

double CostLedger::ComponentEnergy(Component c) const {
  double e = 0.0;
  for (int s = 0; s < kNumStages; ++s) e += energy_j[s][c];
  return e;
}

double CostLedger::TotalTime() const {
  double t = 0.0;
  for (int s = 0; s < kNumStages; ++s) t += time_s[s];
  return t;
}

double CostLedger::TotalEnergy() const {
  double e = 0.0;
  for (int s = 0; s < kNumStages; ++s) e += StageEnergy(static_cast<Stage>(s));
  return e;
}

CostLedger FrameCost(arith::Precision mode, std::int64_t tokens,
                     const HwConfig &hw) {
  CostLedger led;
  led.AddStage(kStageFeature, FeatureFrameCost(hw));
  led.AddStage(kStageIvector, IvectorFrameCost(hw));
  led.AddStage(kStageAm, AmFrameCost(hw.am_model_bytes, mode, hw),
               /*weight_traffic=*/true);
  led.AddStage(kStageBeam, BeamFrameCost(tokens, hw));
  led.frames = 1;
  led.half_frames = mode == arith::Precision::kHalf ? 1 : 0;
  return led;
}

CostLedger UtteranceCost(const std::vector<CostLedger> &frame_entries) {
  CostLedger total;
  for (const auto &f : frame_entries) total.Add(f);
  return total;
}

AmSavings ComputeAmSavings(const CostLedger &led, const HwConfig &hw) {
  if (led.frames == 0) return {};
  const StageCost base = AmFrameCost(hw.am_model_bytes,
                                     arith::Precision::kBase, hw);
  const double base_time = base.time_s * led.frames;
  const double base_energy = base.TotalEnergy() * led.frames;
  AmSavings s;
  s.time_pct = 100.0 * (1.0 - led.StageTime(kStageAm) / base_time);
  s.energy_pct = 100.0 * (1.0 - led.StageEnergy(kStageAm) / base_energy);
  return s;
}

SystemSavings ComputeSystemSavings(const CostLedger &technique,
                                   const CostLedger &baseline) {
  if (!(baseline.TotalTime() > 0.0) || !(baseline.TotalEnergy() > 0.0)) {
    throw ValidationError("ComputeSystemSavings: empty baseline ledger");
  }
  SystemSavings s;
  s.time_pct = 100.0 * (1.0 - technique.TotalTime() / baseline.TotalTime());
  s.energy_pct =
      100.0 * (1.0 - technique.TotalEnergy() / baseline.TotalEnergy());
  return s;
}

}  // namespace cost
}  // namespace dynprec
