// tests/test_arith.cc

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

#include "arith/nfu.h"

#include <cstdint>
#include <vector>

#include "doctest.h"
#include "util/errors.h"
#include "util/rng.h"

using namespace dynprec;
using namespace dynprec::arith;

TEST_CASE("MulBase matches exact products") {
  CHECK(MulBase(0, 37) == 0);
  CHECK(MulBase(-128, -128) == 16384);
  CHECK(MulBase(100, -7) == -700);
  for (int a = -128; a <= 127; ++a) {
    for (int w = -128; w <= 127; ++w) {
      REQUIRE(MulBase(static_cast<std::int8_t>(a),
                      static_cast<std::int8_t>(w)) == a * w);
    }
  }
}

TEST_CASE("MulDuplex shares the operand across two exact narrow products") {
  CHECK(MulDuplex(0, {-8, 7}) == std::pair<std::int32_t, std::int32_t>{0, 0});
  CHECK(MulDuplex(100, {-8, 7}) ==
        std::pair<std::int32_t, std::int32_t>{-800, 700});

  // Exhaustive over the full 8x4x4-bit operand space against the naive
  // products (65,536 cases).
  for (int a = -128; a <= 127; ++a) {
    for (int w0 = -8; w0 <= 7; ++w0) {
      for (int w1 = -8; w1 <= 7; ++w1) {
        const auto [p0, p1] =
            MulDuplex(static_cast<std::int8_t>(a),
                      {static_cast<std::int8_t>(w0), static_cast<std::int8_t>(w1)});
        REQUIRE(p0 == a * w0);
        REQUIRE(p1 == a * w1);
      }
    }
  }
}

TEST_CASE("HalfPair nibble packing round-trips") {
  for (int w0 = -8; w0 <= 7; ++w0) {
    for (int w1 = -8; w1 <= 7; ++w1) {
      const HalfPair w{static_cast<std::int8_t>(w0), static_cast<std::int8_t>(w1)};
      const HalfPair back = UnpackHalfPair(PackHalfPair(w));
      REQUIRE(back.w0 == w.w0);
      REQUIRE(back.w1 == w.w1);
    }
  }
}

TEST_CASE("AddTreeBase") {
  const AddTreeConfig cfg = BaseTreeConfig();

  SUBCASE("zeros") {
    std::vector<std::int32_t> leaves(16, 0);
    CHECK(AddTreeBase(leaves, cfg) == 0);
  }
  SUBCASE("max corner") {
    std::vector<std::int32_t> leaves(16, 16384);
    CHECK(AddTreeBase(leaves, cfg) == 262144);
  }
  SUBCASE("random leaves vs fold-left oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<std::int32_t> leaves(16);
      std::int64_t want = 0;
      for (auto &v : leaves) {
        v = static_cast<std::int32_t>(rng.UniformInt(-16384, 16384));
        want += v;
      }
      REQUIRE(AddTreeBase(leaves, cfg) == want);
    }
  }
  SUBCASE("wrong leaf count rejected") {
    std::vector<std::int32_t> leaves(15, 0);
    CHECK_THROWS_AS(AddTreeBase(leaves, cfg), ValidationError);
  }
}

TEST_CASE("AddTreeSplit behaves as two independent narrow trees") {
  const AddTreeConfig cfg = HalfTreeConfig();

  SUBCASE("zeros") {
    std::vector<std::int32_t> z(16, 0);
    CHECK(AddTreeSplit(z, z, cfg) == std::pair<std::int64_t, std::int64_t>{0, 0});
  }
  SUBCASE("extreme 12-bit products") {
    std::vector<std::int32_t> lo(16, -1024);
    std::vector<std::int32_t> hi(16, 1016);
    CHECK(AddTreeSplit(lo, hi, cfg) ==
          std::pair<std::int64_t, std::int64_t>{-16384, 16256});
  }
  SUBCASE("randomized vs per-half fold-left sums") {
    Rng rng(202);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<std::int32_t> lo(16), hi(16);
      std::int64_t want_lo = 0, want_hi = 0;
      for (int i = 0; i < 16; ++i) {
        lo[i] = static_cast<std::int32_t>(rng.UniformInt(-1016, 1024));
        hi[i] = static_cast<std::int32_t>(rng.UniformInt(-1016, 1024));
        want_lo += lo[i];
        want_hi += hi[i];
      }
      const auto [got_lo, got_hi] = AddTreeSplit(lo, hi, cfg);
      REQUIRE(got_lo == want_lo);
      REQUIRE(got_hi == want_hi);
    }
  }
  SUBCASE("carry gating never leaks: split equals two base trees") {
    Rng rng(303);
    const AddTreeConfig wide = BaseTreeConfig();
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<std::int32_t> lo(16), hi(16);
      for (int i = 0; i < 16; ++i) {
        lo[i] = static_cast<std::int32_t>(rng.UniformInt(-1016, 1024));
        hi[i] = static_cast<std::int32_t>(rng.UniformInt(-1016, 1024));
      }
      const auto [s_lo, s_hi] = AddTreeSplit(lo, hi, cfg);
      REQUIRE(s_lo == AddTreeBase(lo, wide));
      REQUIRE(s_hi == AddTreeBase(hi, wide));
    }
  }
  SUBCASE("wrong leaf counts rejected") {
    std::vector<std::int32_t> a(16, 0), b(8, 0);
    CHECK_THROWS_AS(AddTreeSplit(b, a, cfg), ValidationError);
    CHECK_THROWS_AS(AddTreeSplit(a, b, cfg), ValidationError);
  }
}

TEST_CASE("AddTreeConfig validation") {
  AddTreeConfig bad;
  bad.fan_in = 12;
  CHECK_THROWS_AS(bad.Validate(kBaseProductBits), ValidationError);

  AddTreeConfig narrow;
  narrow.fan_in = 16;
  narrow.accumulator_bits = 17;  // needs 16 + 4
  CHECK_THROWS_AS(narrow.Validate(kBaseProductBits), ValidationError);

  CHECK_NOTHROW(BaseTreeConfig().Validate(kBaseProductBits));
  CHECK_NOTHROW(HalfTreeConfig().Validate(kHalfProductBits));
}

TEST_CASE("DotBase") {
  const AddTreeConfig cfg = BaseTreeConfig();

  SUBCASE("all zero") {
    std::vector<std::int8_t> a(16, 0), w(16, 0);
    CHECK(DotBase(a, w, cfg) == 0);
  }
  SUBCASE("length-16 vectors vs naive dot product") {
    Rng rng(404);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<std::int8_t> a(16), w(16);
      std::int64_t want = 0;
      for (int i = 0; i < 16; ++i) {
        a[i] = static_cast<std::int8_t>(rng.UniformInt(-128, 127));
        w[i] = static_cast<std::int8_t>(rng.UniformInt(-128, 127));
        want += static_cast<std::int64_t>(a[i]) * w[i];
      }
      REQUIRE(DotBase(a, w, cfg) == want);
    }
  }
  SUBCASE("multi-tile vectors") {
    Rng rng(405);
    std::vector<std::int8_t> a(64), w(64);
    std::int64_t want = 0;
    for (int i = 0; i < 64; ++i) {
      a[i] = static_cast<std::int8_t>(rng.UniformInt(-128, 127));
      w[i] = static_cast<std::int8_t>(rng.UniformInt(-128, 127));
      want += static_cast<std::int64_t>(a[i]) * w[i];
    }
    CHECK(DotBase(a, w, cfg) == want);
  }
  SUBCASE("length mismatch rejected") {
    std::vector<std::int8_t> a(16, 1), w(32, 1);
    CHECK_THROWS_AS(DotBase(a, w, cfg), ValidationError);
    std::vector<std::int8_t> odd(18, 1);
    CHECK_THROWS_AS(DotBase(odd, odd, cfg), ValidationError);
  }
}

TEST_CASE("DotHalf") {
  const AddTreeConfig cfg = HalfTreeConfig();

  SUBCASE("all zero") {
    std::vector<std::int8_t> a(16, 0);
    std::vector<HalfPair> w(16);
    CHECK(DotHalf(a, w, cfg) == std::pair<std::int64_t, std::int64_t>{0, 0});
  }
  SUBCASE("vs naive per-neuron dot products") {
    Rng rng(505);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<std::int8_t> a(32);
      std::vector<HalfPair> w(32);
      std::int64_t want0 = 0, want1 = 0;
      for (int i = 0; i < 32; ++i) {
        a[i] = static_cast<std::int8_t>(rng.UniformInt(-128, 127));
        w[i].w0 = static_cast<std::int8_t>(rng.UniformInt(-8, 7));
        w[i].w1 = static_cast<std::int8_t>(rng.UniformInt(-8, 7));
        want0 += static_cast<std::int64_t>(a[i]) * w[i].w0;
        want1 += static_cast<std::int64_t>(a[i]) * w[i].w1;
      }
      const auto [got0, got1] = DotHalf(a, w, cfg);
      REQUIRE(got0 == want0);
      REQUIRE(got1 == want1);
    }
  }
  SUBCASE("identical weight halves give identical outputs") {
    Rng rng(506);
    std::vector<std::int8_t> a(16);
    std::vector<HalfPair> w(16);
    for (int i = 0; i < 16; ++i) {
      a[i] = static_cast<std::int8_t>(rng.UniformInt(-128, 127));
      const auto v = static_cast<std::int8_t>(rng.UniformInt(-8, 7));
      w[i] = {v, v};
    }
    const auto [s0, s1] = DotHalf(a, w, cfg);
    CHECK(s0 == s1);
  }
}
