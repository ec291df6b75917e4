// pipeline/decode.cc

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

#include "pipeline/decode.h"

#include <algorithm>
#include <unordered_map>

#include "util/errors.h"

namespace dynprec {
namespace pipeline {

using arith::Precision;

DecodeMode ParseDecodeMode(const std::string &name) {
  if (name == "dynamic") return DecodeMode::kDynamic;
  if (name == "fixed-base") return DecodeMode::kFixedBase;
  if (name == "fixed-half") return DecodeMode::kFixedHalf;
  if (name == "random-ablation") return DecodeMode::kRandomAblation;
  throw ValidationError("unknown decode mode: " + name);
}

const char *DecodeModeName(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kDynamic: return "dynamic";
    case DecodeMode::kFixedBase: return "fixed-base";
    case DecodeMode::kFixedHalf: return "fixed-half";
    case DecodeMode::kRandomAblation: return "random-ablation";
  }
  return "?";
}

double UtteranceResult::HalfRatio() const {
  if (frames.empty()) return 0.0;
  std::int64_t half = 0;
  for (const auto &f : frames) {
    if (f.mode == Precision::kHalf) ++half;
  }
  return static_cast<double>(half) / static_cast<double>(frames.size());
}

namespace {

DecodeMode EffectiveMode(const RunConfig &cfg) {
  if (cfg.mode == DecodeMode::kDynamic && !cfg.controller.threshold_infinite) {
    if (cfg.controller.target_ratio == 0.0) return DecodeMode::kFixedBase;
    if (cfg.controller.target_ratio == 1.0) return DecodeMode::kFixedHalf;
  }
  return cfg.mode;
}

}  // namespace

CorpusDecoder::CorpusDecoder(const qnn::QuantizedModel &model,
                             const wfst::Wfst &graph, const RunConfig &cfg)
    : model_(model),
      graph_(graph),
      cfg_(cfg),
      mode_(EffectiveMode(cfg)),
      controller_(cfg.controller),
      ablation_rng_(cfg.ablation_seed) {
  cfg_.beam.Validate();
  cfg_.hw.Validate();
  if (graph_.max_ilabel != model_.OutputDim()) {
    throw ValidationError(
        "graph senone alphabet does not match the model's output dimension");
  }
}

Precision CorpusDecoder::PickMode(ctrl::Decision *decision_out) {
  switch (mode_) {
    case DecodeMode::kFixedBase:
      return Precision::kBase;
    case DecodeMode::kFixedHalf:
      return Precision::kHalf;
    case DecodeMode::kRandomAblation:
      return ablation_rng_.Uniform() < cfg_.controller.target_ratio
                 ? Precision::kHalf
                 : Precision::kBase;
    case DecodeMode::kDynamic: {
      *decision_out = controller_.Decide(prev_count_);
      return decision_out->mode;
    }
  }
  return Precision::kBase;
}

UtteranceResult CorpusDecoder::DecodeUtterance(
    const qnn::FeatureMatrix &features, std::span<const std::int32_t> ref_words,
    const std::string &utt_id) {
  if (cfg_.per_utterance_reset) {
    controller_ = ctrl::PrecisionController(cfg_.controller);
    prev_count_ = ctrl::kNoPriorCount;
  }

  UtteranceResult result;
  result.id = utt_id;
  result.ref_words.assign(ref_words.begin(), ref_words.end());

  wfst::BeamSearch search(graph_, cfg_.beam);
  search.Init();

  try {
    for (int t = 0; t < features.frames; ++t) {
      ctrl::Decision decision;
      const Precision mode = PickMode(&decision);
      const auto scores = qnn::ScoreFrame(model_, features, t, mode);
      search.ExpandFrame(scores);
      const std::int64_t tokens = search.TokenCount();

      FrameRecord record;
      record.mode = mode;
      record.tokens = tokens;
      if (mode_ == DecodeMode::kDynamic) {
        controller_.RecordAndUpdate(decision);
        record.threshold = controller_.threshold_is_infinite()
                               ? -1
                               : decision.threshold_at_decision;
        record.observed = decision.token_count_observed == ctrl::kNoPriorCount
                              ? -1
                              : decision.token_count_observed;
      }
      result.frames.push_back(record);
      result.ledger.Add(cost::FrameCost(mode, tokens, cfg_.hw));
      prev_count_ = tokens;
    }
    const auto decoded = search.Finalize();
    result.hyp_words = decoded.words;
    result.reached_final = decoded.reached_final;
  } catch (const DecodeError &e) {
    result.failed = true;
    result.error = e.what();
    result.hyp_words.clear();
    result.reached_final = false;
  }

  result.wer = ComputeWer(result.ref_words, result.hyp_words);
  return result;
}

std::vector<std::int32_t> MapWords(const std::vector<std::string> &words,
                                   const wfst::SymbolTable &table) {
  std::unordered_map<std::string, std::int32_t> index;
  for (std::size_t i = 0; i < table.symbols.size(); ++i) {
    index.emplace(table.symbols[i], static_cast<std::int32_t>(i));
  }
  std::vector<std::int32_t> ids;
  ids.reserve(words.size());
  for (const auto &w : words) {
    const auto it = index.find(w);
    if (it == index.end() || it->second == 0) {
      throw ValidationError("reference word not in the symbol table: " + w);
    }
    ids.push_back(it->second);
  }
  return ids;
}

CorpusResult CorpusDecoder::RunAll(const std::vector<ManifestEntry> &entries,
                                   const wfst::SymbolTable &words) {
  CorpusResult corpus;
  std::int64_t half = 0, frames = 0;
  for (const auto &entry : entries) {
    UtteranceResult result;
    try {
      const auto features = LoadFeatures(entry.feature_path);
      const auto ref = MapWords(entry.words, words);
      result = DecodeUtterance(features, ref, entry.utt_id);
    } catch (const Error &e) {
      // Unreadable input: score the reference as fully deleted and move on.
      result.id = entry.utt_id;
      result.failed = true;
      result.reached_final = false;
      result.error = e.what();
      result.wer = WerCounts{};
      result.wer.ref_words = static_cast<std::int64_t>(entry.words.size());
      result.wer.deletions = result.wer.ref_words;
    }
    corpus.wer.Add(result.wer);
    corpus.ledger.Add(result.ledger);
    if (result.failed) ++corpus.failures;
    for (const auto &f : result.frames) {
      ++frames;
      if (f.mode == Precision::kHalf) ++half;
    }
    corpus.utterances.push_back(std::move(result));
  }
  corpus.half_ratio =
      frames > 0 ? static_cast<double>(half) / static_cast<double>(frames) : 0.0;
  return corpus;
}

std::vector<SweepRow> SensitivitySweep(const qnn::QuantizedModel &model,
                                       const wfst::Wfst &graph,
                                       const wfst::SymbolTable &words,
                                       const std::vector<ManifestEntry> &entries,
                                       const RunConfig &base_cfg,
                                       std::span<const double> targets) {
  for (const double t : targets) {
    if (t < 0.0 || t > 1.0) {
      throw ValidationError("sweep targets must lie in [0, 1]");
    }
  }

  RunConfig baseline_cfg = base_cfg;
  baseline_cfg.mode = DecodeMode::kFixedBase;
  CorpusDecoder baseline_decoder(model, graph, baseline_cfg);
  const CorpusResult baseline = baseline_decoder.RunAll(entries, words);

  std::vector<SweepRow> rows;
  for (const double target : targets) {
    RunConfig cfg = base_cfg;
    cfg.mode = DecodeMode::kDynamic;
    cfg.controller.target_ratio = target;

    SweepRow row;
    row.target = target;
    const CorpusResult result = [&] {
      if (target == 0.0) return baseline;  // same degenerate policy
      CorpusDecoder decoder(model, graph, cfg);
      return decoder.RunAll(entries, words);
    }();
    row.achieved_ratio = result.half_ratio;
    row.wer = result.wer.Rate();
    const auto am = cost::ComputeAmSavings(result.ledger, cfg.hw);
    row.am_time_saving = am.time_pct;
    row.am_energy_saving = am.energy_pct;
    const auto sys = cost::ComputeSystemSavings(result.ledger, baseline.ledger);
    row.sys_time_saving = sys.time_pct;
    row.sys_energy_saving = sys.energy_pct;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pipeline
}  // namespace dynprec
