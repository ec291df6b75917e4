// qnn/model.h

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

// Quantized feed-forward acoustic model. The same float model is quantized
// independently to 8-bit and 4-bit planes, both resident; the precision mode
// selects which stored codes are fed to the NFU, never the arithmetic
// semantics. Activations are 8-bit in both modes.

#ifndef DYNPREC_QNN_MODEL_H_
#define DYNPREC_QNN_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arith/nfu.h"

namespace dynprec {
namespace qnn {

enum class Activation : std::uint8_t { kRelu = 0, kIdentity = 1 };

struct ContextSpec {
  int left = 0;
  int right = 0;
  int Width() const { return left + right + 1; }
};

struct FloatLayer {
  int in_dim = 0;
  int out_dim = 0;
  Activation activation = Activation::kRelu;
  std::vector<double> weights;  // row-major [out][in]
  std::vector<double> bias;     // [out]
};

struct FloatModel {
  ContextSpec ctx;
  std::vector<FloatLayer> layers;

  int InputDim() const { return layers.empty() ? 0 : layers.front().in_dim; }
  int OutputDim() const { return layers.empty() ? 0 : layers.back().out_dim; }
  // Checks dimension chaining and that the final layer is Identity.
  void Validate() const;
};

// One precision plane of a layer: quantized codes plus the bias folded into
// the integer domain with the combined weight x activation scale.
struct LayerPlane {
  std::vector<std::int8_t> codes;   // row-major [out][in]
  double scale = 1.0;               // weight scale
  std::vector<std::int64_t> bias_int;
};

struct QuantLayer {
  int in_dim = 0;
  int out_dim = 0;
  Activation activation = Activation::kRelu;
  double act_in_scale = 1.0;  // scale of this layer's 8-bit input codes
  std::vector<double> bias;   // unfolded biases, kept for serialization
  LayerPlane base;            // 8-bit
  LayerPlane half;            // 4-bit

  const LayerPlane &Plane(arith::Precision p) const {
    return p == arith::Precision::kBase ? base : half;
  }
};

struct QuantizedModel {
  ContextSpec ctx;
  std::vector<QuantLayer> layers;

  int InputDim() const { return layers.empty() ? 0 : layers.front().in_dim; }
  int OutputDim() const { return layers.empty() ? 0 : layers.back().out_dim; }
  void Validate() const;
  // Size of the 8-bit weight plane in bytes (one byte per weight).
  std::int64_t BaseWeightBytes() const;
};

struct FeatureMatrix {
  int frames = 0;
  int dim = 0;
  double frame_period_ms = 10.0;
  std::vector<float> data;  // frame-major [frames][dim]

  std::span<const float> Frame(int t) const {
    return {data.data() + static_cast<std::size_t>(t) * dim,
            static_cast<std::size_t>(dim)};
  }
};

// Concatenation of frames [t-left, t+right] with edge replication.
std::vector<double> Splice(const FeatureMatrix &features, int t,
                           const ContextSpec &ctx);

// Reference float path (used to calibrate activation scales and as a
// baseline in experiments). Returns per-senone log-softmax scores.
std::vector<double> FloatForward(const FloatModel &model,
                                 std::span<const double> spliced);

// Quantizes a float model to both precision planes. Activation scales are
// fixed here from a max-abs calibration pass over the given spliced inputs;
// they are part of the model from then on.
QuantizedModel BuildQuantizedModel(
    const FloatModel &model,
    std::span<const std::vector<double>> calibration_inputs);

// Layer-by-layer integer inference through the NFU model at the requested
// precision; final layer output is passed through log-softmax. In half mode
// every multiply goes through the duplex unit, two neurons per shared input.
std::vector<double> Forward(const QuantizedModel &model,
                            std::span<const double> spliced,
                            arith::Precision mode);

// Splice + Forward.
std::vector<double> ScoreFrame(const QuantizedModel &model,
                               const FeatureMatrix &features, int t,
                               arith::Precision mode);

// log(sum(exp(x))) with max-shifting.
double LogSumExp(std::span<const double> x);

}  // namespace qnn
}  // namespace dynprec

#endif  // DYNPREC_QNN_MODEL_H_
