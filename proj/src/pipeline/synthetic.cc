// pipeline/synthetic.cc

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

#include "pipeline/synthetic.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "cost/cost_model.h"
#include "pipeline/corpus_io.h"
#include "qnn/model_io.h"
#include "util/errors.h"

namespace dynprec {
namespace pipeline {

namespace {

// Per-senone gain spreading weight magnitudes, so 4-bit quantization hits
// small-magnitude rows noticeably harder than 8-bit does.
double SenoneGain(Rng &rng) { return rng.Uniform(0.5, 2.0); }

std::string WordName(int w) {
  std::ostringstream os;
  os << 'w' << std::setw(3) << std::setfill('0') << w;
  return os.str();
}

// Number of senones arranged as close prototype pairs (even count).
int ConfusablePaired(const GenConfig &cfg) {
  int paired = static_cast<int>(cfg.senones * cfg.confusable_fraction);
  paired -= paired % 2;
  return std::min(paired, cfg.senones - cfg.senones % 2);
}

std::vector<std::vector<int>> BuildLexicon(const GenConfig &cfg, Rng &rng) {
  std::vector<std::vector<int>> lexicon;
  std::set<std::vector<int>> seen;

  // Coverage first: the early words walk through every senone id so the
  // graph's input alphabet is exactly [1, K].
  int next = 0;
  while (next < cfg.senones) {
    std::vector<int> word;
    const int len = static_cast<int>(
        rng.UniformInt(cfg.min_word_len, cfg.max_word_len));
    for (int i = 0; i < len; ++i) {
      word.push_back(next < cfg.senones
                         ? next++
                         : static_cast<int>(rng.UniformInt(0, cfg.senones - 1)));
    }
    seen.insert(word);
    lexicon.push_back(std::move(word));
  }
  if (static_cast<int>(lexicon.size()) > cfg.vocab) {
    throw ValidationError(
        "GenConfig: vocab too small to cover every senone; raise vocab or "
        "max_word_len");
  }

  // Remaining words are random, but word-initial senones lean heavily on
  // the confusable pairs: that is where the hub fans out, so acoustic
  // ambiguity and a crowded search frontier coincide, as they do in real
  // decoding graphs. A fraction of words become minimal-pair twins of an
  // existing word, differing only in the initial senone's pair parity.
  const int paired = ConfusablePaired(cfg);
  while (static_cast<int>(lexicon.size()) < cfg.vocab) {
    const bool want_twin = paired > 0 && !lexicon.empty() &&
                           rng.Uniform() < cfg.twin_fraction;
    std::vector<int> word;
    if (want_twin) {
      word = lexicon[static_cast<std::size_t>(
          rng.UniformInt(0, static_cast<std::int64_t>(lexicon.size()) - 1))];
      if (word.front() < paired) {
        word.front() ^= 1;  // swap to the confusable partner
      } else {
        word.clear();
      }
    }
    if (word.empty()) {
      const int len = static_cast<int>(
          rng.UniformInt(cfg.min_word_len, cfg.max_word_len));
      for (int i = 0; i < len; ++i) {
        const bool confusable_start =
            i == 0 && paired > 0 && rng.Uniform() < 0.75;
        word.push_back(static_cast<int>(
            confusable_start ? rng.UniformInt(0, paired - 1)
                             : rng.UniformInt(0, cfg.senones - 1)));
      }
    }
    if (seen.insert(word).second) lexicon.push_back(std::move(word));
  }
  return lexicon;
}

wfst::Wfst BuildGraph(const GenConfig &cfg,
                      const std::vector<std::vector<int>> &lexicon,
                      const std::vector<double> &word_cost) {
  const double stay_cost = -std::log(cfg.stay_prob);
  const double advance_cost = -std::log(1.0 - cfg.stay_prob);

  wfst::Wfst g;
  const int hub = 0;
  g.start = hub;
  g.arcs.emplace_back();  // hub
  g.final_cost.push_back(0.0);

  for (std::size_t w = 0; w < lexicon.size(); ++w) {
    const auto &senones = lexicon[w];
    std::int32_t prev = hub;
    for (std::size_t i = 0; i < senones.size(); ++i) {
      const std::int32_t state = g.NumStates();
      g.arcs.emplace_back();
      g.final_cost.push_back(wfst::kInfCost);
      const std::int32_t ilabel = senones[i] + 1;
      // Entering the state consumes the senone's first frame; the word
      // label rides on the entry arc.
      g.arcs[prev].push_back(wfst::Arc{
          state, ilabel,
          i == 0 ? static_cast<std::int32_t>(w + 1) : wfst::kEpsilon,
          i == 0 ? word_cost[w] : advance_cost});
      g.arcs[state].push_back(wfst::Arc{state, ilabel, wfst::kEpsilon,
                                        stay_cost});  // self loop
      prev = state;
    }
    // Word end: back to the hub without consuming a frame.
    g.arcs[prev].push_back(
        wfst::Arc{hub, wfst::kEpsilon, wfst::kEpsilon, advance_cost});
  }
  for (const auto &arcs : g.arcs) {
    for (const auto &a : arcs) g.max_ilabel = std::max(g.max_ilabel, a.ilabel);
  }
  g.Validate();
  return g;
}

// Double-rail construction: h = ReLU([A; -A] x + c) keeps both rails linear
// for |a_k . x| < c, and the output layer reads the difference back out.
// The common-mode vector rides on every row of both rails and cancels in
// the difference.
qnn::FloatModel BuildModel(const GenConfig &cfg,
                           const std::vector<std::vector<double>> &prototypes,
                           const std::vector<double> &common_mode,
                           double temp, double rail_offset) {
  const int k = cfg.senones;
  const int d = cfg.feature_dim;
  const int width = cfg.ctx_left + cfg.ctx_right + 1;
  const int in_dim = width * d;
  const int center = cfg.ctx_left * d;

  qnn::FloatModel m;
  m.ctx = {cfg.ctx_left, cfg.ctx_right};

  qnn::FloatLayer l1;
  l1.in_dim = in_dim;
  l1.out_dim = 2 * k;
  l1.activation = qnn::Activation::kRelu;
  l1.weights.assign(static_cast<std::size_t>(in_dim) * 2 * k, 0.0);
  l1.bias.assign(2 * k, rail_offset);
  for (int s = 0; s < k; ++s) {
    for (int j = 0; j < d; ++j) {
      const double w = prototypes[s][j] / temp;
      const double cm = common_mode[j];
      l1.weights[static_cast<std::size_t>(s) * in_dim + center + j] = w + cm;
      l1.weights[static_cast<std::size_t>(k + s) * in_dim + center + j] =
          -w + cm;
    }
  }
  m.layers.push_back(std::move(l1));

  // Optional exact identity layers: rails are non-negative after ReLU.
  for (int extra = 2; extra < cfg.layers; ++extra) {
    qnn::FloatLayer id;
    id.in_dim = 2 * k;
    id.out_dim = 2 * k;
    id.activation = qnn::Activation::kRelu;
    id.weights.assign(static_cast<std::size_t>(2 * k) * 2 * k, 0.0);
    id.bias.assign(2 * k, 0.0);
    for (int i = 0; i < 2 * k; ++i) {
      id.weights[static_cast<std::size_t>(i) * 2 * k + i] = 1.0;
    }
    m.layers.push_back(std::move(id));
  }

  qnn::FloatLayer l2;
  l2.in_dim = 2 * k;
  l2.out_dim = k;
  l2.activation = qnn::Activation::kIdentity;
  l2.weights.assign(static_cast<std::size_t>(2 * k) * k, 0.0);
  l2.bias.assign(k, 0.0);
  for (int s = 0; s < k; ++s) {
    double sq = 0.0;
    for (int j = 0; j < d; ++j) sq += prototypes[s][j] * prototypes[s][j];
    l2.weights[static_cast<std::size_t>(s) * 2 * k + s] = 0.5;
    l2.weights[static_cast<std::size_t>(s) * 2 * k + k + s] = -0.5;
    l2.bias[s] = -sq / (2.0 * temp);
  }
  m.layers.push_back(std::move(l2));
  m.Validate();
  return m;
}

}  // namespace

void GenConfig::Validate() const {
  if (senones < 2) throw ValidationError("GenConfig: senones must be >= 2");
  if (feature_dim < 1) {
    throw ValidationError("GenConfig: feature_dim must be >= 1");
  }
  if (vocab < 1) throw ValidationError("GenConfig: vocab must be >= 1");
  if (noise < 0.0) throw ValidationError("GenConfig: noise must be >= 0");
  if (min_word_len < 1 || max_word_len < min_word_len) {
    throw ValidationError("GenConfig: bad word length range");
  }
  if (!(stay_prob > 0.0 && stay_prob < 1.0)) {
    throw ValidationError("GenConfig: stay_prob must be in (0, 1)");
  }
  if (utterances < 1) throw ValidationError("GenConfig: utterances must be >= 1");
  if (min_words < 1 || max_words < min_words) {
    throw ValidationError("GenConfig: bad utterance word-count range");
  }
  if (ctx_left < 0 || ctx_right < 0) {
    throw ValidationError("GenConfig: negative context");
  }
  if (layers < 2) throw ValidationError("GenConfig: layers must be >= 2");
  if (score_temp < 0.0) {
    throw ValidationError("GenConfig: score_temp must be >= 0 (0 = auto)");
  }
  if (confusable_fraction < 0.0 || confusable_fraction > 1.0 ||
      twin_fraction < 0.0 || twin_fraction > 1.0) {
    throw ValidationError("GenConfig: fractions must lie in [0, 1]");
  }
  if (confusable_offset <= 0.0) {
    throw ValidationError("GenConfig: confusable_offset must be > 0");
  }
  if (weight_common_mode < 0.0) {
    throw ValidationError("GenConfig: weight_common_mode must be >= 0");
  }
}

double GenConfig::EffectiveTemp() const {
  if (score_temp > 0.0) return score_temp;
  return std::max(noise * noise, 1e-4);
}

SyntheticTask GenerateTask(const GenConfig &cfg) {
  cfg.Validate();
  Rng rng(cfg.seed);

  SyntheticTask task;
  task.cfg = cfg;
  task.lexicon = BuildLexicon(cfg, rng);

  // Unigram grammar with random (seeded) probabilities.
  std::vector<double> mass(cfg.vocab);
  double total = 0.0;
  for (auto &v : mass) {
    v = rng.Uniform(0.5, 2.0);
    total += v;
  }
  task.word_cost.resize(cfg.vocab);
  for (int w = 0; w < cfg.vocab; ++w) {
    task.word_cost[w] = -std::log(mass[w] / total);
  }

  task.prototypes.assign(cfg.senones,
                         std::vector<double>(cfg.feature_dim, 0.0));
  auto random_direction = [&](double norm) {
    std::vector<double> v(cfg.feature_dim);
    double sq = 0.0;
    for (auto &x : v) {
      x = rng.Normal();
      sq += x * x;
    }
    const double gain = norm / std::sqrt(std::max(sq, 1e-12));
    for (auto &x : v) x *= gain;
    return v;
  };

  const int paired = ConfusablePaired(cfg);
  for (int s = 0; s < cfg.senones; ++s) {
    if (s < paired && s % 2 == 1) {
      // Close partner of the previous senone: same bump plus a small offset
      // whose scale sits at confusable_offset noise standard deviations.
      task.prototypes[s] = task.prototypes[s - 1];
      const auto offset = random_direction(cfg.confusable_offset *
                                           std::max(cfg.noise, 0.025));
      for (int j = 0; j < cfg.feature_dim; ++j) {
        task.prototypes[s][j] += offset[j];
      }
    } else {
      task.prototypes[s] = random_direction(SenoneGain(rng));
    }
  }

  task.common_mode =
      random_direction(cfg.weight_common_mode / cfg.EffectiveTemp());

  task.graph = BuildGraph(cfg, task.lexicon, task.word_cost);
  task.words.symbols.push_back("<eps>");
  for (int w = 0; w < cfg.vocab; ++w) {
    task.words.symbols.push_back(WordName(w));
  }
  // Provisional rail offset; corpus generation re-derives it from data.
  task.model = BuildModel(cfg, task.prototypes, task.common_mode,
                          cfg.EffectiveTemp(), 8.0);
  return task;
}

GeneratedCorpus GenerateCorpus(const GenConfig &cfg) {
  GeneratedCorpus corpus;
  corpus.task = GenerateTask(cfg);
  const auto &task = corpus.task;

  // Sampling uses a stream forked off the task seed so the task structure
  // is independent of the utterance count.
  Rng rng = Rng(cfg.seed).Fork(1);

  std::vector<double> unigram_cdf(cfg.vocab);
  {
    double acc = 0.0;
    for (int w = 0; w < cfg.vocab; ++w) {
      acc += std::exp(-task.word_cost[w]);
      unigram_cdf[w] = acc;
    }
    for (auto &v : unigram_cdf) v /= acc;
  }
  auto sample_word = [&](Rng &r) {
    const double u = r.Uniform();
    return static_cast<int>(
        std::lower_bound(unigram_cdf.begin(), unigram_cdf.end(), u) -
        unigram_cdf.begin());
  };

  for (int u = 0; u < cfg.utterances; ++u) {
    Utterance utt;
    const int n_words =
        static_cast<int>(rng.UniformInt(cfg.min_words, cfg.max_words));
    std::vector<float> frames;
    for (int i = 0; i < n_words; ++i) {
      const int w = std::min(sample_word(rng), cfg.vocab - 1);
      utt.word_labels.push_back(w + 1);
      for (const int senone : task.lexicon[w]) {
        const std::int64_t duration = rng.Geometric(1.0 - cfg.stay_prob);
        for (std::int64_t f = 0; f < duration; ++f) {
          for (int j = 0; j < cfg.feature_dim; ++j) {
            frames.push_back(static_cast<float>(task.prototypes[senone][j] +
                                                cfg.noise * rng.Normal()));
          }
        }
      }
    }
    utt.features.dim = cfg.feature_dim;
    utt.features.frames = static_cast<int>(frames.size() / cfg.feature_dim);
    utt.features.frame_period_ms = cfg.frame_period_ms;
    utt.features.data = std::move(frames);
    corpus.utterances.push_back(std::move(utt));
  }

  // Rail offset: the hidden layer must stay linear over the data actually
  // generated (both rails, common mode included). Then re-run the
  // calibration pass and quantize.
  double max_dot = 0.0;
  for (const auto &utt : corpus.utterances) {
    for (int t = 0; t < utt.features.frames; ++t) {
      const auto frame = utt.features.Frame(t);
      double cm_dot = 0.0;
      for (int j = 0; j < cfg.feature_dim; ++j) {
        cm_dot += task.common_mode[j] * frame[j];
      }
      for (int s = 0; s < cfg.senones; ++s) {
        double dot = 0.0;
        for (int j = 0; j < cfg.feature_dim; ++j) {
          dot += task.prototypes[s][j] * frame[j];
        }
        dot /= cfg.EffectiveTemp();
        max_dot = std::max({max_dot, std::fabs(dot + cm_dot),
                            std::fabs(-dot + cm_dot)});
      }
    }
  }
  corpus.task.model = BuildModel(cfg, task.prototypes, task.common_mode,
                                 cfg.EffectiveTemp(), 1.1 * max_dot + 1.0);

  std::vector<std::vector<double>> calibration;
  const std::size_t budget = 512;
  std::size_t taken = 0;
  for (const auto &utt : corpus.utterances) {
    for (int t = 0; t < utt.features.frames && taken < budget; t += 3) {
      calibration.push_back(
          qnn::Splice(utt.features, t, corpus.task.model.ctx));
      ++taken;
    }
    if (taken >= budget) break;
  }
  corpus.quantized = qnn::BuildQuantizedModel(corpus.task.model, calibration);
  return corpus;
}

void WriteCorpus(const GeneratedCorpus &corpus, const std::string &dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "features", ec);
  if (ec) throw IoError("cannot create output directory: " + dir);

  const auto &cfg = corpus.task.cfg;
  std::vector<ManifestEntry> entries;
  for (std::size_t u = 0; u < corpus.utterances.size(); ++u) {
    std::ostringstream name;
    name << "utt_" << std::setw(5) << std::setfill('0') << u;
    const std::string rel = "features/" + name.str() + ".feat";
    SaveFeatures(corpus.utterances[u].features,
                 (fs::path(dir) / rel).string());
    ManifestEntry e;
    e.utt_id = name.str();
    e.feature_path = rel;
    for (const auto label : corpus.utterances[u].word_labels) {
      e.words.push_back(corpus.task.words.Name(label));
    }
    entries.push_back(std::move(e));
  }
  SaveManifest(entries, (fs::path(dir) / "manifest.txt").string());
  corpus.task.words.Save((fs::path(dir) / "words.syms").string());
  wfst::SaveWfst(corpus.task.graph, (fs::path(dir) / "graph.wfst").string());
  qnn::SaveModel(corpus.quantized, (fs::path(dir) / "model.dpam").string());
  cost::SaveCalibration(cost::HwConfig{},
                        (fs::path(dir) / "calibration.json").string());

  std::ofstream os((fs::path(dir) / "gen_config.json").string());
  os << "{\n"
     << "  \"seed\": " << cfg.seed << ",\n"
     << "  \"senones\": " << cfg.senones << ",\n"
     << "  \"feature_dim\": " << cfg.feature_dim << ",\n"
     << "  \"noise\": " << cfg.noise << ",\n"
     << "  \"vocab\": " << cfg.vocab << ",\n"
     << "  \"min_word_len\": " << cfg.min_word_len << ",\n"
     << "  \"max_word_len\": " << cfg.max_word_len << ",\n"
     << "  \"stay_prob\": " << cfg.stay_prob << ",\n"
     << "  \"utterances\": " << cfg.utterances << ",\n"
     << "  \"min_words\": " << cfg.min_words << ",\n"
     << "  \"max_words\": " << cfg.max_words << ",\n"
     << "  \"ctx_left\": " << cfg.ctx_left << ",\n"
     << "  \"ctx_right\": " << cfg.ctx_right << ",\n"
     << "  \"layers\": " << cfg.layers << ",\n"
     << "  \"score_temp\": " << cfg.score_temp << "\n"
     << "}\n";
  if (!os) throw IoError("write failure on gen_config.json");
}

}  // namespace pipeline
}  // namespace dynprec
