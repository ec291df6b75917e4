// arith/nfu.cc

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

#include <cassert>
#include <sstream>
#include <vector>

#include "util/errors.h"

namespace dynprec {
namespace arith {

namespace {

std::uint64_t FieldMask(int bits) {
  return bits >= 64 ? ~0ULL : ((1ULL << bits) - 1);
}

// Two's-complement value of a width-`bits` field.
std::int64_t SignExtend(std::uint64_t field, int bits) {
  const std::uint64_t sign = 1ULL << (bits - 1);
  field &= FieldMask(bits);
  return static_cast<std::int64_t>((field ^ sign)) - static_cast<std::int64_t>(sign);
}

std::uint64_t ToField(std::int64_t v, int bits) {
  return static_cast<std::uint64_t>(v) & FieldMask(bits);
}

// One adder node: a single adder of width 2*half_bits whose carry out of the
// low half into the high half is controlled by the mode line. With the gate
// open (base mode) this is an ordinary wide add; with the gate closed (half
// mode) the two halves add independently.
std::uint64_t GatedAdd(std::uint64_t x, std::uint64_t y, int half_bits,
                       bool gate_mid_carry) {
  const std::uint64_t half_mask = FieldMask(half_bits);
  if (!gate_mid_carry) {
    return (x + y) & FieldMask(2 * half_bits);
  }
  const std::uint64_t lo = ((x & half_mask) + (y & half_mask)) & half_mask;
  const std::uint64_t hi =
      (((x >> half_bits) & half_mask) + ((y >> half_bits) & half_mask)) &
      half_mask;
  return (hi << half_bits) | lo;
}

// 8xN signed shift-add multiplier array: one partial product per multiplier
// bit, with the sign bit (weight -2^(n-1)) entering negated. This is the
// narrow multiplier replicated twice in the duplex unit.
std::int32_t ShiftAddMul(std::int8_t multiplicand, int multiplier, int bits) {
  assert(multiplier >= -(1 << (bits - 1)) && multiplier < (1 << (bits - 1)));
  const std::uint32_t code = static_cast<std::uint32_t>(multiplier) &
                             static_cast<std::uint32_t>((1 << bits) - 1);
  std::int32_t acc = 0;
  for (int i = 0; i < bits - 1; ++i) {
    if (code & (1u << i)) acc += static_cast<std::int32_t>(multiplicand) << i;
  }
  if (code & (1u << (bits - 1))) {
    acc -= static_cast<std::int32_t>(multiplicand) << (bits - 1);
  }
  return acc;
}

void CheckLeafCount(std::size_t got, int want, const char *who) {
  if (static_cast<int>(got) != want) {
    std::ostringstream os;
    os << who << ": expected " << want << " leaves, got " << got;
    throw ValidationError(os.str());
  }
}

bool IsPowerOfTwo(int v) { return v > 0 && (v & (v - 1)) == 0; }

int CeilLog2(int v) {
  int b = 0;
  while ((1 << b) < v) ++b;
  return b;
}

}  // namespace

AddTreeConfig AddTreeConfig::ForProducts(int product_bits, int fan_in) {
  AddTreeConfig cfg;
  cfg.fan_in = fan_in;
  cfg.accumulator_bits = product_bits + CeilLog2(fan_in);
  return cfg;
}

void AddTreeConfig::Validate(int product_bits) const {
  if (!IsPowerOfTwo(fan_in)) {
    throw ValidationError("AddTreeConfig: fan_in must be a power of two");
  }
  if (accumulator_bits < product_bits + CeilLog2(fan_in)) {
    std::ostringstream os;
    os << "AddTreeConfig: accumulator of " << accumulator_bits
       << " bits cannot hold " << fan_in << " products of " << product_bits
       << " bits";
    throw ValidationError(os.str());
  }
  if (accumulator_bits < 2 || accumulator_bits > 31) {
    throw ValidationError("AddTreeConfig: accumulator_bits out of model range");
  }
}

std::int32_t MulBase(std::int8_t a, std::int8_t w) {
  return ShiftAddMul(a, w, kBaseBits);
}

std::pair<std::int32_t, std::int32_t> MulDuplex(std::int8_t a,
                                                const HalfPair &w) {
  assert(InHalfRange(w.w0) && InHalfRange(w.w1));
  // One multiplicand register feeds both narrow arrays.
  const std::int8_t shared = a;
  return {ShiftAddMul(shared, w.w0, kHalfBits),
          ShiftAddMul(shared, w.w1, kHalfBits)};
}

std::uint8_t PackHalfPair(const HalfPair &w) {
  assert(InHalfRange(w.w0) && InHalfRange(w.w1));
  return static_cast<std::uint8_t>((w.w0 & 0x0f) | ((w.w1 & 0x0f) << 4));
}

HalfPair UnpackHalfPair(std::uint8_t byte) {
  auto nib = [](std::uint8_t v) -> std::int8_t {
    return static_cast<std::int8_t>((v & 0x0f) >= 8 ? (v & 0x0f) - 16
                                                    : (v & 0x0f));
  };
  return HalfPair{nib(byte), nib(static_cast<std::uint8_t>(byte >> 4))};
}

std::int64_t AddTreeBase(std::span<const std::int32_t> leaves,
                         const AddTreeConfig &cfg) {
  cfg.Validate(kBaseProductBits);
  CheckLeafCount(leaves.size(), cfg.fan_in, "AddTreeBase");
  const int w = cfg.accumulator_bits;

  std::vector<std::uint64_t> level(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) level[i] = ToField(leaves[i], w);

  while (level.size() > 1) {
    std::vector<std::uint64_t> next(level.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const std::uint64_t sum =
          (level[2 * i] + level[2 * i + 1]) & FieldMask(w);
      assert(SignExtend(sum, w) ==
             SignExtend(level[2 * i], w) + SignExtend(level[2 * i + 1], w));
      next[i] = sum;
    }
    level.swap(next);
  }
  return SignExtend(level[0], w);
}

std::pair<std::int64_t, std::int64_t> AddTreeSplit(
    std::span<const std::int32_t> leaves_lo,
    std::span<const std::int32_t> leaves_hi, const AddTreeConfig &cfg) {
  cfg.Validate(kHalfProductBits);
  CheckLeafCount(leaves_lo.size(), cfg.fan_in, "AddTreeSplit(lo)");
  CheckLeafCount(leaves_hi.size(), cfg.fan_in, "AddTreeSplit(hi)");
  const int w = cfg.accumulator_bits;

  // Each tree node carries both halves packed into one word, exactly as the
  // doubled-width adder sees them.
  std::vector<std::uint64_t> level(leaves_lo.size());
  for (std::size_t i = 0; i < level.size(); ++i) {
    level[i] = (ToField(leaves_hi[i], w) << w) | ToField(leaves_lo[i], w);
  }

  while (level.size() > 1) {
    std::vector<std::uint64_t> next(level.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const std::uint64_t sum =
          GatedAdd(level[2 * i], level[2 * i + 1], w, /*gate_mid_carry=*/true);
      assert(SignExtend(sum & FieldMask(w), w) ==
                 SignExtend(level[2 * i] & FieldMask(w), w) +
                     SignExtend(level[2 * i + 1] & FieldMask(w), w) &&
             SignExtend(sum >> w, w) == SignExtend(level[2 * i] >> w, w) +
                                            SignExtend(level[2 * i + 1] >> w, w));
      next[i] = sum;
    }
    level.swap(next);
  }
  return {SignExtend(level[0] & FieldMask(w), w), SignExtend(level[0] >> w, w)};
}

std::int64_t DotBase(std::span<const std::int8_t> a,
                     std::span<const std::int8_t> w, const AddTreeConfig &cfg) {
  if (a.size() != w.size() || a.size() % cfg.fan_in != 0) {
    throw ValidationError("DotBase: vector length must match the fan_in tiling");
  }
  std::int64_t acc = 0;
  std::vector<std::int32_t> products(cfg.fan_in);
  for (std::size_t tile = 0; tile < a.size(); tile += cfg.fan_in) {
    for (int i = 0; i < cfg.fan_in; ++i) {
      products[i] = MulBase(a[tile + i], w[tile + i]);
    }
    acc += AddTreeBase(products, cfg);
  }
  return acc;
}

std::pair<std::int64_t, std::int64_t> DotHalf(std::span<const std::int8_t> a,
                                              std::span<const HalfPair> w,
                                              const AddTreeConfig &cfg) {
  if (a.size() != w.size() || a.size() % cfg.fan_in != 0) {
    throw ValidationError("DotHalf: vector length must match the fan_in tiling");
  }
  std::int64_t acc0 = 0;
  std::int64_t acc1 = 0;
  std::vector<std::int32_t> lo(cfg.fan_in);
  std::vector<std::int32_t> hi(cfg.fan_in);
  for (std::size_t tile = 0; tile < a.size(); tile += cfg.fan_in) {
    for (int i = 0; i < cfg.fan_in; ++i) {
      const auto [p0, p1] = MulDuplex(a[tile + i], w[tile + i]);
      lo[i] = p0;
      hi[i] = p1;
    }
    const auto [s0, s1] = AddTreeSplit(lo, hi, cfg);
    acc0 += s0;
    acc1 += s1;
  }
  return {acc0, acc1};
}

}  // namespace arith
}  // namespace dynprec
