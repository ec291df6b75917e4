// pipeline/synthetic.h

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

// Synthetic decoding task. Each senone is a Gaussian bump in feature space;
// words are senone sequences with geometric per-senone durations; a unigram
// grammar over the words composes with the lexicon into a senone-level
// decoding graph. The float acoustic model is constructed analytically: a
// double-rail hidden layer keeps ReLU transparent so its scores equal the
// true class log-likelihoods, and all accuracy loss then comes from
// quantization. Everything is deterministic in the seed.

#ifndef DYNPREC_PIPELINE_SYNTHETIC_H_
#define DYNPREC_PIPELINE_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "qnn/model.h"
#include "util/rng.h"
#include "wfst/wfst.h"

namespace dynprec {
namespace pipeline {

struct GenConfig {
  std::uint64_t seed = 7;
  int senones = 64;        // K
  int feature_dim = 16;    // D
  double noise = 0.45;     // feature noise sigma
  int vocab = 200;
  int min_word_len = 2;    // senones per word
  int max_word_len = 6;
  double stay_prob = 0.5;  // senone self-loop probability
  int utterances = 50;
  int min_words = 6;
  int max_words = 12;
  int ctx_left = 2;
  int ctx_right = 2;
  int layers = 2;          // >= 2; extra layers are exact identities
  // Score temperature; 0 (the default) derives it from the noise as
  // max(noise^2, 1e-4), the true-posterior scale.
  double score_temp = 0.0;
  double frame_period_ms = 10.0;

  // Acoustic confusability. A fraction of the senones comes in close pairs
  // (prototype distance confusable_offset x noise); twin words differing
  // only at such a pair are minimal pairs whose fine margin survives 8-bit
  // weights but collapses under 4-bit quantization.
  double confusable_fraction = 0.5;
  double confusable_offset = 2.0;
  double twin_fraction = 0.4;  // of the non-coverage vocabulary

  // Common-mode component added to every hidden weight row. It cancels in
  // the rail-difference readout, so exact scores are unchanged, but it
  // dominates the per-tensor quantization scale the way outlier weights do
  // in trained networks: 8-bit still resolves the row differences, 4-bit
  // flattens them.
  double weight_common_mode = 6.0;

  void Validate() const;
  double EffectiveTemp() const;
};

struct SyntheticTask {
  GenConfig cfg;
  std::vector<std::vector<int>> lexicon;    // word -> senone ids (0-based)
  std::vector<double> word_cost;            // -log unigram probability
  std::vector<std::vector<double>> prototypes;  // senone emission means
  std::vector<double> common_mode;          // shared hidden-row component
  qnn::FloatModel model;
  wfst::Wfst graph;
  wfst::SymbolTable words;  // "<eps>", then w000, w001, ...
};

struct Utterance {
  qnn::FeatureMatrix features;
  std::vector<std::int32_t> word_labels;  // graph output labels (1-based)
};

// Builds lexicon, grammar graph and prototypes. The acoustic model's hidden
// rail offset is finalized per corpus (see GenerateCorpus), so tasks from
// this call alone score with a provisional offset.
SyntheticTask GenerateTask(const GenConfig &cfg);

struct GeneratedCorpus {
  SyntheticTask task;
  std::vector<Utterance> utterances;
  qnn::QuantizedModel quantized;  // calibrated on the generated corpus
};

GeneratedCorpus GenerateCorpus(const GenConfig &cfg);

// Writes manifest.txt, words.syms, graph.wfst, model.dpam, calibration.json
// (defaults), gen_config.json and features/*.feat under dir.
void WriteCorpus(const GeneratedCorpus &corpus, const std::string &dir);

}  // namespace pipeline
}  // namespace dynprec

#endif  // DYNPREC_PIPELINE_SYNTHETIC_H_
