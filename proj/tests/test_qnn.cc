// tests/test_qnn.cc

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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "qnn/model.h"
#include "qnn/model_io.h"
#include "qnn/quantize.h"
#include "util/errors.h"
#include "util/rng.h"

using namespace dynprec;
using namespace dynprec::qnn;

namespace {

// Random little model: in -> hidden (ReLU) -> out (Identity).
FloatModel MakeModel(Rng &rng, int in, int hidden, int out,
                     double weight_span = 1.0) {
  FloatModel m;
  m.ctx = {0, 0};
  FloatLayer l1;
  l1.in_dim = in;
  l1.out_dim = hidden;
  l1.activation = Activation::kRelu;
  l1.weights.resize(static_cast<std::size_t>(in) * hidden);
  l1.bias.resize(hidden);
  for (auto &w : l1.weights) w = rng.Uniform(-weight_span, weight_span);
  for (auto &b : l1.bias) b = rng.Uniform(-0.1, 0.1);
  FloatLayer l2;
  l2.in_dim = hidden;
  l2.out_dim = out;
  l2.activation = Activation::kIdentity;
  l2.weights.resize(static_cast<std::size_t>(hidden) * out);
  l2.bias.resize(out);
  for (auto &w : l2.weights) w = rng.Uniform(-weight_span, weight_span);
  for (auto &b : l2.bias) b = rng.Uniform(-0.1, 0.1);
  m.layers = {l1, l2};
  return m;
}

std::vector<std::vector<double>> MakeInputs(Rng &rng, int count, int dim,
                                            double span = 2.0) {
  std::vector<std::vector<double>> inputs(count, std::vector<double>(dim));
  for (auto &v : inputs) {
    for (auto &x : v) x = rng.Uniform(-span, span);
  }
  return inputs;
}

// Reference forward using dequantized codes and the same activation
// quantization points; only the rescaling arithmetic differs from the
// integer path.
std::vector<double> DequantReference(const QuantizedModel &m,
                                     std::span<const double> input,
                                     arith::Precision mode) {
  std::vector<double> act(input.begin(), input.end());
  for (const auto &ly : m.layers) {
    const LayerPlane &plane = ly.Plane(mode);
    const auto a_codes = QuantizeActivations(act, ly.act_in_scale);
    std::vector<double> next(ly.out_dim);
    for (int o = 0; o < ly.out_dim; ++o) {
      double s = static_cast<double>(plane.bias_int[o]) * plane.scale *
                 ly.act_in_scale;
      for (int i = 0; i < ly.in_dim; ++i) {
        const double w =
            plane.codes[static_cast<std::size_t>(o) * ly.in_dim + i] *
            plane.scale;
        s += w * (a_codes[i] * ly.act_in_scale);
      }
      next[o] = ly.activation == Activation::kRelu ? std::max(0.0, s) : s;
    }
    act.swap(next);
  }
  const double lse = LogSumExp(act);
  for (auto &v : act) v -= lse;
  return act;
}

}  // namespace

TEST_CASE("RoundHalfToEven") {
  CHECK(RoundHalfToEven(3.5) == 4.0);
  CHECK(RoundHalfToEven(2.5) == 2.0);
  CHECK(RoundHalfToEven(-3.5) == -4.0);
  CHECK(RoundHalfToEven(-2.5) == -2.0);
  CHECK(RoundHalfToEven(0.5) == 0.0);
  CHECK(RoundHalfToEven(1.5) == 2.0);
  CHECK(RoundHalfToEven(1.25) == 1.0);
  CHECK(RoundHalfToEven(-0.75) == -1.0);
}

TEST_CASE("QuantizeLinear") {
  SUBCASE("all-zero tensor is the documented degenerate case") {
    const std::vector<double> w = {0.0, 0.0, 0.0};
    const auto q = QuantizeLinear(w, 8);
    CHECK(q.scale == 1.0);
    CHECK(q.codes == std::vector<std::int8_t>{0, 0, 0});
  }
  SUBCASE("4-bit example with a banker's-rounding tie") {
    const std::vector<double> w = {-1.0, 0.5, 1.0};
    const auto q = QuantizeLinear(w, 4);
    CHECK(q.scale == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK(q.codes == std::vector<std::int8_t>{-7, 4, 7});
  }
  SUBCASE("reconstruction error bounded by scale/2") {
    Rng rng(11);
    for (int bits : {4, 8}) {
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> w(64);
        for (auto &v : w) v = rng.Uniform(-3.0, 3.0);
        const auto q = QuantizeLinear(w, bits);
        for (std::size_t i = 0; i < w.size(); ++i) {
          REQUIRE(std::fabs(w[i] - q.codes[i] * q.scale) <=
                  q.scale / 2 + 1e-12);
        }
      }
    }
  }
  SUBCASE("rejects bad input") {
    const std::vector<double> w = {1.0, std::nan("")};
    CHECK_THROWS_AS(QuantizeLinear(w, 8), ValidationError);
    const std::vector<double> ok = {1.0};
    CHECK_THROWS_AS(QuantizeLinear(ok, 5), ValidationError);
  }
}

TEST_CASE("QuantizeActivations") {
  SUBCASE("zero vector") {
    const std::vector<double> v(8, 0.0);
    const auto codes = QuantizeActivations(v, 0.5);
    for (auto c : codes) CHECK(c == 0);
  }
  SUBCASE("range endpoint") {
    const double scale = 0.037;
    const std::vector<double> v = {scale * 127.0};
    CHECK(QuantizeActivations(v, scale)[0] == 127);
  }
  SUBCASE("clamps beyond the calibrated range") {
    const std::vector<double> v = {10.0, -10.0};
    const auto codes = QuantizeActivations(v, 0.01);
    CHECK(codes[0] == 127);
    CHECK(codes[1] == -127);
  }
  SUBCASE("random vectors vs scalar oracle") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
      const double scale = rng.Uniform(0.01, 1.0);
      std::vector<double> v(32);
      for (auto &x : v) x = rng.Uniform(-2.0, 2.0);
      const auto codes = QuantizeActivations(v, scale);
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double q = RoundHalfToEven(v[i] / scale);
        REQUIRE(codes[i] == static_cast<std::int8_t>(std::clamp(q, -127.0, 127.0)));
      }
    }
  }
  SUBCASE("non-positive scale rejected") {
    const std::vector<double> v = {1.0};
    CHECK_THROWS_AS(QuantizeActivations(v, 0.0), ValidationError);
  }
}

TEST_CASE("Splice") {
  FeatureMatrix f;
  f.frames = 4;
  f.dim = 2;
  f.data = {0, 1, 10, 11, 20, 21, 30, 31};

  SUBCASE("identity context") {
    const auto v = Splice(f, 2, {0, 0});
    CHECK(v == std::vector<double>{20, 21});
  }
  SUBCASE("edge replication on a single-frame input") {
    FeatureMatrix one;
    one.frames = 1;
    one.dim = 2;
    one.data = {5, 6};
    const auto v = Splice(one, 0, {2, 0});
    CHECK(v == std::vector<double>{5, 6, 5, 6, 5, 6});
  }
  SUBCASE("interior frame matches manual concatenation") {
    const auto v = Splice(f, 2, {1, 1});
    CHECK(v == std::vector<double>{10, 11, 20, 21, 30, 31});
  }
  SUBCASE("left edge replicates the first frame") {
    const auto v = Splice(f, 0, {2, 1});
    CHECK(v == std::vector<double>{0, 1, 0, 1, 0, 1, 10, 11});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(Splice(f, 4, {0, 0}), ValidationError);
    FeatureMatrix empty;
    CHECK_THROWS_AS(Splice(empty, 0, {0, 0}), ValidationError);
  }
}

TEST_CASE("Forward") {
  Rng rng(21);
  FloatModel fm = MakeModel(rng, 24, 32, 10);
  const auto inputs = MakeInputs(rng, 32, 24);
  const QuantizedModel qm = BuildQuantizedModel(fm, inputs);

  SUBCASE("base mode matches the dequantized float reference within 1e-5") {
    for (int i = 0; i < 8; ++i) {
      const auto got = Forward(qm, inputs[i], arith::Precision::kBase);
      const auto want = DequantReference(qm, inputs[i], arith::Precision::kBase);
      REQUIRE(got.size() == want.size());
      for (std::size_t k = 0; k < got.size(); ++k) {
        REQUIRE(got[k] == doctest::Approx(want[k]).epsilon(0).scale(1).epsilon(1e-5));
      }
    }
  }
  SUBCASE("half mode equals base arithmetic on the 4-bit plane") {
    QuantizedModel swapped = qm;
    for (auto &ly : swapped.layers) ly.base = ly.half;
    for (int i = 0; i < 8; ++i) {
      const auto half = Forward(qm, inputs[i], arith::Precision::kHalf);
      const auto base4 = Forward(swapped, inputs[i], arith::Precision::kBase);
      REQUIRE(half == base4);  // bit-exact
    }
  }
  SUBCASE("scores are normalized") {
    for (auto mode : {arith::Precision::kBase, arith::Precision::kHalf}) {
      const auto s = Forward(qm, inputs[0], mode);
      CHECK(std::fabs(LogSumExp(s)) < 1e-5);
      for (double v : s) CHECK(std::isfinite(v));
    }
  }
  SUBCASE("dimension mismatch rejected") {
    std::vector<double> bad(7, 0.0);
    CHECK_THROWS_AS(Forward(qm, bad, arith::Precision::kBase), ValidationError);
  }
  SUBCASE("odd output width works in half mode") {
    FloatModel fm2 = MakeModel(rng, 8, 13, 7);
    const auto ins = MakeInputs(rng, 8, 8);
    const QuantizedModel qm2 = BuildQuantizedModel(fm2, ins);
    QuantizedModel swapped = qm2;
    for (auto &ly : swapped.layers) ly.base = ly.half;
    const auto half = Forward(qm2, ins[0], arith::Precision::kHalf);
    const auto base4 = Forward(swapped, ins[0], arith::Precision::kBase);
    CHECK(half == base4);
  }
}

TEST_CASE("Forward near-identity sanity") {
  // One Identity layer whose weight matrix is the scaled identity: output
  // should reproduce the input up to quantization error, then log-softmax.
  FloatModel fm;
  fm.ctx = {0, 0};
  FloatLayer l;
  l.in_dim = 8;
  l.out_dim = 8;
  l.activation = Activation::kIdentity;
  l.weights.assign(64, 0.0);
  for (int i = 0; i < 8; ++i) l.weights[i * 8 + i] = 1.0;
  l.bias.assign(8, 0.0);
  fm.layers = {l};

  Rng rng(31);
  const auto inputs = MakeInputs(rng, 16, 8, 1.0);
  const QuantizedModel qm = BuildQuantizedModel(fm, inputs);

  const auto &x = inputs[3];
  const auto got = Forward(qm, x, arith::Precision::kBase);
  const double lse = LogSumExp(x);
  for (int i = 0; i < 8; ++i) {
    CHECK(got[i] == doctest::Approx(x[i] - lse).epsilon(0.05));
  }
}

TEST_CASE("ScoreFrame composes Splice and Forward") {
  Rng rng(41);
  FloatModel fm = MakeModel(rng, 12, 16, 6);
  fm.ctx = {1, 1};

  FeatureMatrix feats;
  feats.frames = 5;
  feats.dim = 4;
  feats.data.resize(20);
  for (auto &v : feats.data) v = static_cast<float>(rng.Uniform(-1.0, 1.0));

  std::vector<std::vector<double>> calib;
  for (int t = 0; t < feats.frames; ++t) calib.push_back(Splice(feats, t, fm.ctx));
  const QuantizedModel qm = BuildQuantizedModel(fm, calib);

  for (int t = 0; t < feats.frames; ++t) {
    const auto a = ScoreFrame(qm, feats, t, arith::Precision::kBase);
    const auto b = Forward(qm, Splice(feats, t, qm.ctx), arith::Precision::kBase);
    REQUIRE(a == b);
    CHECK(std::fabs(LogSumExp(a)) < 1e-5);
  }
}

TEST_CASE("Base/Half divergence grows with quantization error") {
  // Wider weight distributions quantize worse at 4 bits; the gap between
  // base-mode and half-mode scores should grow with the weight spread.
  Rng rng(51);
  double prev_gap = -1.0;
  for (double spread : {0.5, 4.0}) {
    Rng local(77);
    FloatModel fm = MakeModel(local, 16, 24, 8);
    // Inject a few outlier weights so the 4-bit scale stretches.
    for (auto &ly : fm.layers) {
      for (std::size_t i = 0; i < ly.weights.size(); i += 17) {
        ly.weights[i] *= spread;
      }
    }
    const auto inputs = MakeInputs(rng, 16, 16);
    const QuantizedModel qm = BuildQuantizedModel(fm, inputs);
    double gap = 0.0;
    for (const auto &x : inputs) {
      const auto b = Forward(qm, x, arith::Precision::kBase);
      const auto h = Forward(qm, x, arith::Precision::kHalf);
      for (std::size_t k = 0; k < b.size(); ++k) {
        gap = std::max(gap, std::fabs(b[k] - h[k]));
      }
    }
    if (prev_gap >= 0.0) CHECK(gap > prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("Model file round-trips bit-exactly") {
  Rng rng(61);
  FloatModel fm = MakeModel(rng, 10, 14, 9);
  fm.ctx = {2, 1};
  const auto inputs = MakeInputs(rng, 8, 10);
  const QuantizedModel qm = BuildQuantizedModel(fm, inputs);

  const auto dir = std::filesystem::temp_directory_path() / "dynprec_qnn_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "model.dpam").string();
  SaveModel(qm, path);
  const QuantizedModel back = LoadModel(path);

  REQUIRE(back.layers.size() == qm.layers.size());
  CHECK(back.ctx.left == qm.ctx.left);
  CHECK(back.ctx.right == qm.ctx.right);
  for (std::size_t l = 0; l < qm.layers.size(); ++l) {
    const auto &a = qm.layers[l];
    const auto &b = back.layers[l];
    CHECK(a.act_in_scale == b.act_in_scale);
    CHECK(a.bias == b.bias);
    CHECK(a.base.scale == b.base.scale);
    CHECK(a.base.codes == b.base.codes);
    CHECK(a.base.bias_int == b.base.bias_int);
    CHECK(a.half.scale == b.half.scale);
    CHECK(a.half.codes == b.half.codes);
    CHECK(a.half.bias_int == b.half.bias_int);
  }

  const auto x = MakeInputs(rng, 1, 10)[0];
  CHECK(Forward(qm, x, arith::Precision::kHalf) ==
        Forward(back, x, arith::Precision::kHalf));

  SUBCASE("bad magic rejected") {
    const std::string bad = (dir / "bad.dpam").string();
    std::FILE *f = std::fopen(bad.c_str(), "wb");
    std::fputs("NOPE", f);
    std::fclose(f);
    CHECK_THROWS_AS(LoadModel(bad), IoError);
  }
  SUBCASE("truncated file rejected") {
    std::filesystem::resize_file(path, 24);
    CHECK_THROWS_AS(LoadModel(path), IoError);
  }
}
