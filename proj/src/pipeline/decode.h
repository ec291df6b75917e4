// pipeline/decode.h

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

// Streaming decode loop. Per frame: decide the precision from the previous
// search step's token count, score the frame at that precision, expand the
// beam search, count the surviving tokens, book the controller and the cost
// ledger. Frames are strictly sequential; utterances are sequential too when
// the global controller carries state across them.

#ifndef DYNPREC_PIPELINE_DECODE_H_
#define DYNPREC_PIPELINE_DECODE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cost/cost_model.h"
#include "ctrl/controller.h"
#include "pipeline/corpus_io.h"
#include "pipeline/wer.h"
#include "qnn/model.h"
#include "util/rng.h"
#include "wfst/decoder.h"
#include "wfst/wfst.h"

namespace dynprec {
namespace pipeline {

enum class DecodeMode { kDynamic, kFixedBase, kFixedHalf, kRandomAblation };

DecodeMode ParseDecodeMode(const std::string &name);
const char *DecodeModeName(DecodeMode mode);

struct RunConfig {
  DecodeMode mode = DecodeMode::kDynamic;
  wfst::BeamConfig beam;
  ctrl::ControllerConfig controller;
  cost::HwConfig hw;
  // Reset controller state at each utterance (the paper's rejected
  // per-utterance-ratio alternative, kept for ablation).
  bool per_utterance_reset = false;
  std::uint64_t ablation_seed = 1;
};

struct FrameRecord {
  arith::Precision mode = arith::Precision::kBase;
  std::int64_t tokens = 0;     // surviving tokens after this frame's pruning
  std::int64_t threshold = -1; // Th at decision time; -1 without a controller
  std::int64_t observed = -1;  // token count the decision saw; -1 at start
};

struct UtteranceResult {
  std::string id;
  std::vector<std::int32_t> ref_words;
  std::vector<std::int32_t> hyp_words;
  std::vector<FrameRecord> frames;
  cost::CostLedger ledger;
  WerCounts wer;
  bool reached_final = true;
  bool failed = false;
  std::string error;

  double HalfRatio() const;
};

struct CorpusResult {
  std::vector<UtteranceResult> utterances;
  WerCounts wer;
  cost::CostLedger ledger;
  std::int64_t failures = 0;
  double half_ratio = 0.0;
};

// Decodes utterances one by one against a shared controller. A target ratio
// of exactly 0 or 1 degenerates the dynamic policy into the corresponding
// fixed mode.
class CorpusDecoder {
 public:
  CorpusDecoder(const qnn::QuantizedModel &model, const wfst::Wfst &graph,
                const RunConfig &cfg);

  UtteranceResult DecodeUtterance(const qnn::FeatureMatrix &features,
                                  std::span<const std::int32_t> ref_words,
                                  const std::string &utt_id);

  // Loads every manifest entry, maps reference words through the symbol
  // table, decodes, and aggregates. Per-utterance failures are recorded and
  // the run continues.
  CorpusResult RunAll(const std::vector<ManifestEntry> &entries,
                      const wfst::SymbolTable &words);

  const ctrl::PrecisionController &controller() const { return controller_; }
  DecodeMode effective_mode() const { return mode_; }

 private:
  arith::Precision PickMode(ctrl::Decision *decision_out);

  const qnn::QuantizedModel &model_;
  const wfst::Wfst &graph_;
  RunConfig cfg_;
  DecodeMode mode_;
  ctrl::PrecisionController controller_;
  std::int64_t prev_count_ = ctrl::kNoPriorCount;
  Rng ablation_rng_;
};

struct SweepRow {
  double target = 0.0;
  double achieved_ratio = 0.0;
  double wer = 0.0;
  double am_time_saving = 0.0;
  double am_energy_saving = 0.0;
  double sys_time_saving = 0.0;
  double sys_energy_saving = 0.0;
};

// Runs the corpus once per target ratio (target 0 is the fixed-base
// baseline the savings are measured against) and reports the WER/savings
// curve.
std::vector<SweepRow> SensitivitySweep(const qnn::QuantizedModel &model,
                                       const wfst::Wfst &graph,
                                       const wfst::SymbolTable &words,
                                       const std::vector<ManifestEntry> &entries,
                                       const RunConfig &base_cfg,
                                       std::span<const double> targets);

// Maps reference word strings to graph output labels.
std::vector<std::int32_t> MapWords(const std::vector<std::string> &words,
                                   const wfst::SymbolTable &table);

}  // namespace pipeline
}  // namespace dynprec

#endif  // DYNPREC_PIPELINE_DECODE_H_
