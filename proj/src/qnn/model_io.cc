// qnn/model_io.cc

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

#include "qnn/model_io.h"

#include <cstring>
#include <fstream>
#include <vector>

#include "arith/nfu.h"
#include "qnn/quantize.h"
#include "util/binio.h"
#include "util/errors.h"

namespace dynprec {
namespace qnn {

namespace {

constexpr char kMagic[4] = {'D', 'P', 'A', 'M'};
constexpr std::uint32_t kVersion = 1;

std::vector<std::uint8_t> PackRow4(const std::int8_t *codes, int n) {
  std::vector<std::uint8_t> out((n + 1) / 2, 0);
  for (int i = 0; i < n; ++i) {
    const std::uint8_t nib = static_cast<std::uint8_t>(codes[i]) & 0x0f;
    if (i % 2 == 0) {
      out[i / 2] = nib;
    } else {
      out[i / 2] |= static_cast<std::uint8_t>(nib << 4);
    }
  }
  return out;
}

void UnpackRow4(const std::vector<std::uint8_t> &packed, std::int8_t *codes,
                int n) {
  for (int i = 0; i < n; ++i) {
    const std::uint8_t byte = packed[i / 2];
    const auto pair = arith::UnpackHalfPair(byte);
    codes[i] = (i % 2 == 0) ? pair.w0 : pair.w1;
  }
}

std::vector<std::int64_t> Fold(const std::vector<double> &bias, double ws,
                               double as) {
  std::vector<std::int64_t> out(bias.size());
  for (std::size_t i = 0; i < bias.size(); ++i) {
    out[i] = static_cast<std::int64_t>(RoundHalfToEven(bias[i] / (ws * as)));
  }
  return out;
}

}  // namespace

void SaveModel(const QuantizedModel &model, const std::string &path) {
  model.Validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open model file for writing: " + path);

  PutBytes(os, kMagic, 4);
  PutRaw<std::uint32_t>(os, kVersion);
  PutRaw<std::uint32_t>(os, static_cast<std::uint32_t>(model.layers.size()));
  PutRaw<std::int32_t>(os, model.ctx.left);
  PutRaw<std::int32_t>(os, model.ctx.right);

  for (const auto &ly : model.layers) {
    PutRaw<std::uint32_t>(os, static_cast<std::uint32_t>(ly.in_dim));
    PutRaw<std::uint32_t>(os, static_cast<std::uint32_t>(ly.out_dim));
    PutRaw<std::uint8_t>(os, static_cast<std::uint8_t>(ly.activation));
    PutRaw<double>(os, ly.act_in_scale);
    for (double b : ly.bias) PutRaw<double>(os, b);

    PutRaw<double>(os, ly.base.scale);
    PutBytes(os, ly.base.codes.data(), ly.base.codes.size());

    PutRaw<double>(os, ly.half.scale);
    for (int o = 0; o < ly.out_dim; ++o) {
      const auto packed =
          PackRow4(&ly.half.codes[static_cast<std::size_t>(o) * ly.in_dim],
                   ly.in_dim);
      PutBytes(os, packed.data(), packed.size());
    }
  }
  if (!os) throw IoError("write failure on model file: " + path);
}

QuantizedModel LoadModel(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open model file: " + path);

  char magic[4];
  GetBytes(is, magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a model file (bad magic): " + path);
  }
  const auto version = GetRaw<std::uint32_t>(is, "version");
  if (version != kVersion) {
    throw IoError("unsupported model file version " + std::to_string(version));
  }
  const auto n_layers = GetRaw<std::uint32_t>(is, "layer count");
  if (n_layers == 0 || n_layers > 1024) {
    throw ValidationError("model file: implausible layer count");
  }

  QuantizedModel model;
  model.ctx.left = GetRaw<std::int32_t>(is, "ctx_left");
  model.ctx.right = GetRaw<std::int32_t>(is, "ctx_right");
  if (model.ctx.left < 0 || model.ctx.right < 0) {
    throw ValidationError("model file: negative context");
  }

  model.layers.resize(n_layers);
  for (auto &ly : model.layers) {
    ly.in_dim = static_cast<int>(GetRaw<std::uint32_t>(is, "in_dim"));
    ly.out_dim = static_cast<int>(GetRaw<std::uint32_t>(is, "out_dim"));
    if (ly.in_dim <= 0 || ly.out_dim <= 0 || ly.in_dim > (1 << 20) ||
        ly.out_dim > (1 << 20)) {
      throw ValidationError("model file: implausible layer dims");
    }
    const auto act = GetRaw<std::uint8_t>(is, "activation");
    if (act > 1) throw ValidationError("model file: unknown activation tag");
    ly.activation = static_cast<Activation>(act);
    ly.act_in_scale = GetRaw<double>(is, "act_in_scale");

    ly.bias.resize(ly.out_dim);
    for (auto &b : ly.bias) b = GetRaw<double>(is, "bias");

    const std::size_t n = static_cast<std::size_t>(ly.in_dim) * ly.out_dim;
    ly.base.scale = GetRaw<double>(is, "scale_8");
    ly.base.codes.resize(n);
    GetBytes(is, ly.base.codes.data(), n, "codes_8");

    ly.half.scale = GetRaw<double>(is, "scale_4");
    ly.half.codes.resize(n);
    std::vector<std::uint8_t> packed((ly.in_dim + 1) / 2);
    for (int o = 0; o < ly.out_dim; ++o) {
      GetBytes(is, packed.data(), packed.size(), "codes_4");
      UnpackRow4(packed, &ly.half.codes[static_cast<std::size_t>(o) * ly.in_dim],
                 ly.in_dim);
    }

    ly.base.bias_int = Fold(ly.bias, ly.base.scale, ly.act_in_scale);
    ly.half.bias_int = Fold(ly.bias, ly.half.scale, ly.act_in_scale);
  }

  model.Validate();
  return model;
}

}  // namespace qnn
}  // namespace dynprec
