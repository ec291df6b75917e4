// qnn/model.cc

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

#include "qnn/model.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "qnn/quantize.h"
#include "util/errors.h"

namespace dynprec {
namespace qnn {

namespace {

constexpr int kFanIn = 16;

int PadTo(int n, int multiple) {
  return ((n + multiple - 1) / multiple) * multiple;
}

void CheckDims(int spliced, int input_dim) {
  if (spliced != input_dim) {
    std::ostringstream os;
    os << "Forward: spliced dim " << spliced << " does not match model input "
       << input_dim;
    throw ValidationError(os.str());
  }
}

std::vector<std::int64_t> FoldBias(const std::vector<double> &bias,
                                   double weight_scale, double act_scale) {
  std::vector<std::int64_t> out(bias.size());
  for (std::size_t i = 0; i < bias.size(); ++i) {
    out[i] = static_cast<std::int64_t>(
        RoundHalfToEven(bias[i] / (weight_scale * act_scale)));
  }
  return out;
}

std::vector<double> LogSoftmax(std::vector<double> x) {
  const double lse = LogSumExp(x);
  for (auto &v : x) v -= lse;
  return x;
}

}  // namespace

double LogSumExp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

void FloatModel::Validate() const {
  if (layers.empty()) throw ValidationError("FloatModel: no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto &ly = layers[l];
    if (ly.in_dim <= 0 || ly.out_dim <= 0) {
      throw ValidationError("FloatModel: non-positive layer dimension");
    }
    if (static_cast<std::size_t>(ly.in_dim) * ly.out_dim != ly.weights.size() ||
        static_cast<std::size_t>(ly.out_dim) != ly.bias.size()) {
      throw ValidationError("FloatModel: weight/bias sizes do not match dims");
    }
    if (l > 0 && layers[l - 1].out_dim != ly.in_dim) {
      throw ValidationError("FloatModel: layer dimensions do not chain");
    }
  }
  if (layers.back().activation != Activation::kIdentity) {
    throw ValidationError("FloatModel: final layer must be Identity");
  }
  if (ctx.left < 0 || ctx.right < 0) {
    throw ValidationError("FloatModel: negative context");
  }
}

void QuantizedModel::Validate() const {
  if (layers.empty()) throw ValidationError("QuantizedModel: no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto &ly = layers[l];
    const std::size_t n = static_cast<std::size_t>(ly.in_dim) * ly.out_dim;
    if (ly.base.codes.size() != n || ly.half.codes.size() != n) {
      throw ValidationError("QuantizedModel: code plane size mismatch");
    }
    if (!(ly.base.scale > 0.0) || !(ly.half.scale > 0.0) ||
        !(ly.act_in_scale > 0.0)) {
      throw ValidationError("QuantizedModel: scales must be positive");
    }
    for (std::int8_t c : ly.base.codes) {
      if (c < -127 || c > 127) {
        throw ValidationError("QuantizedModel: 8-bit code out of range");
      }
    }
    for (std::int8_t c : ly.half.codes) {
      if (c < -7 || c > 7) {
        throw ValidationError("QuantizedModel: 4-bit code out of range");
      }
    }
    if (l > 0 && layers[l - 1].out_dim != ly.in_dim) {
      throw ValidationError("QuantizedModel: layer dimensions do not chain");
    }
  }
  if (layers.back().activation != Activation::kIdentity) {
    throw ValidationError("QuantizedModel: final layer must be Identity");
  }
}

std::int64_t QuantizedModel::BaseWeightBytes() const {
  std::int64_t n = 0;
  for (const auto &ly : layers) {
    n += static_cast<std::int64_t>(ly.in_dim) * ly.out_dim;
  }
  return n;
}

std::vector<double> Splice(const FeatureMatrix &features, int t,
                           const ContextSpec &ctx) {
  if (features.frames <= 0 || features.dim <= 0) {
    throw ValidationError("Splice: empty feature matrix");
  }
  if (t < 0 || t >= features.frames) {
    throw ValidationError("Splice: frame index out of range");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ctx.Width()) * features.dim);
  for (int off = -ctx.left; off <= ctx.right; ++off) {
    const int src = std::clamp(t + off, 0, features.frames - 1);
    const auto frame = features.Frame(src);
    out.insert(out.end(), frame.begin(), frame.end());
  }
  return out;
}

std::vector<double> FloatForward(const FloatModel &model,
                                 std::span<const double> spliced) {
  CheckDims(static_cast<int>(spliced.size()), model.InputDim());
  std::vector<double> act(spliced.begin(), spliced.end());
  for (const auto &ly : model.layers) {
    std::vector<double> next(ly.out_dim);
    for (int o = 0; o < ly.out_dim; ++o) {
      double s = ly.bias[o];
      const double *row = &ly.weights[static_cast<std::size_t>(o) * ly.in_dim];
      for (int i = 0; i < ly.in_dim; ++i) s += row[i] * act[i];
      next[o] = ly.activation == Activation::kRelu ? std::max(0.0, s) : s;
    }
    act.swap(next);
  }
  return LogSoftmax(std::move(act));
}

QuantizedModel BuildQuantizedModel(
    const FloatModel &model,
    std::span<const std::vector<double>> calibration_inputs) {
  model.Validate();
  if (calibration_inputs.empty()) {
    throw ValidationError("BuildQuantizedModel: no calibration inputs");
  }

  // Max-abs of every layer input over the calibration set.
  std::vector<double> max_abs(model.layers.size(), 0.0);
  for (const auto &input : calibration_inputs) {
    CheckDims(static_cast<int>(input.size()), model.InputDim());
    std::vector<double> act(input.begin(), input.end());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      const auto &ly = model.layers[l];
      for (double v : act) max_abs[l] = std::max(max_abs[l], std::fabs(v));
      std::vector<double> next(ly.out_dim);
      for (int o = 0; o < ly.out_dim; ++o) {
        double s = ly.bias[o];
        const double *row = &ly.weights[static_cast<std::size_t>(o) * ly.in_dim];
        for (int i = 0; i < ly.in_dim; ++i) s += row[i] * act[i];
        next[o] = ly.activation == Activation::kRelu ? std::max(0.0, s) : s;
      }
      act.swap(next);
    }
  }

  QuantizedModel out;
  out.ctx = model.ctx;
  out.layers.resize(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto &src = model.layers[l];
    auto &dst = out.layers[l];
    dst.in_dim = src.in_dim;
    dst.out_dim = src.out_dim;
    dst.activation = src.activation;
    dst.act_in_scale = max_abs[l] > 0.0 ? max_abs[l] / 127.0 : 1.0;
    dst.bias = src.bias;

    QuantizedTensor q8 = QuantizeLinear(src.weights, 8);
    dst.base.codes = std::move(q8.codes);
    dst.base.scale = q8.scale;
    dst.base.bias_int = FoldBias(src.bias, q8.scale, dst.act_in_scale);

    QuantizedTensor q4 = QuantizeLinear(src.weights, 4);
    dst.half.codes = std::move(q4.codes);
    dst.half.scale = q4.scale;
    dst.half.bias_int = FoldBias(src.bias, q4.scale, dst.act_in_scale);
  }
  out.Validate();
  return out;
}

std::vector<double> Forward(const QuantizedModel &model,
                            std::span<const double> spliced,
                            arith::Precision mode) {
  CheckDims(static_cast<int>(spliced.size()), model.InputDim());

  std::vector<double> act(spliced.begin(), spliced.end());
  for (const auto &ly : model.layers) {
    const LayerPlane &plane = ly.Plane(mode);
    const double rescale = plane.scale * ly.act_in_scale;
    const int padded_in = PadTo(ly.in_dim, kFanIn);

    // 8-bit input codes, zero-padded to the fan-in tiling.
    std::vector<std::int8_t> a = QuantizeActivations(act, ly.act_in_scale);
    a.resize(padded_in, 0);

    std::vector<double> next(ly.out_dim);
    if (mode == arith::Precision::kBase) {
      const auto cfg = arith::BaseTreeConfig();
      std::vector<std::int8_t> row(padded_in, 0);
      for (int o = 0; o < ly.out_dim; ++o) {
        const std::int8_t *w = &plane.codes[static_cast<std::size_t>(o) * ly.in_dim];
        std::copy(w, w + ly.in_dim, row.begin());
        const std::int64_t acc = arith::DotBase(a, row, cfg);
        next[o] = static_cast<double>(acc + plane.bias_int[o]) * rescale;
      }
    } else {
      // Two neurons share each input operand; an odd tail neuron is paired
      // with a phantom all-zero row.
      const auto cfg = arith::HalfTreeConfig();
      std::vector<arith::HalfPair> rows(padded_in);
      for (int o = 0; o < ly.out_dim; o += 2) {
        const std::int8_t *w0 = &plane.codes[static_cast<std::size_t>(o) * ly.in_dim];
        const std::int8_t *w1 =
            o + 1 < ly.out_dim
                ? &plane.codes[static_cast<std::size_t>(o + 1) * ly.in_dim]
                : nullptr;
        for (int i = 0; i < padded_in; ++i) {
          rows[i].w0 = i < ly.in_dim ? w0[i] : 0;
          rows[i].w1 = (w1 != nullptr && i < ly.in_dim) ? w1[i] : 0;
        }
        const auto [acc0, acc1] = arith::DotHalf(a, rows, cfg);
        next[o] = static_cast<double>(acc0 + plane.bias_int[o]) * rescale;
        if (o + 1 < ly.out_dim) {
          next[o + 1] = static_cast<double>(acc1 + plane.bias_int[o + 1]) * rescale;
        }
      }
    }

    if (ly.activation == Activation::kRelu) {
      for (auto &v : next) v = std::max(0.0, v);
    }
    act.swap(next);
  }

  auto scores = LogSoftmax(std::move(act));
  assert(std::fabs(LogSumExp(scores)) < 1e-5);
  return scores;
}

std::vector<double> ScoreFrame(const QuantizedModel &model,
                               const FeatureMatrix &features, int t,
                               arith::Precision mode) {
  return Forward(model, Splice(features, t, model.ctx), mode);
}

}  // namespace qnn
}  // namespace dynprec
