// arith/nfu.h

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

// Functional model of the duplex NFU datapath. The multiplier unit either
// multiplies two base-precision (8-bit) operands, or multiplies two
// half-precision (4-bit) weights by one shared base-precision operand. The
// add-tree is a tree of wide adders whose mid carry is gated by the operating
// mode, so in half mode it acts as two independent narrower trees.
//
// Everything here is value-exact two's-complement arithmetic; no gate-level
// or timing behaviour is modelled.

#ifndef DYNPREC_ARITH_NFU_H_
#define DYNPREC_ARITH_NFU_H_

#include <cstdint>
#include <span>
#include <utility>

namespace dynprec {
namespace arith {

inline constexpr int kBaseBits = 8;   // activation and base-weight width
inline constexpr int kHalfBits = 4;   // half-weight width

inline constexpr int kBaseProductBits = 16;  // 8x8 product
inline constexpr int kHalfProductBits = 12;  // 8x4 product

enum class Precision { kBase, kHalf };

// Two 4-bit weights that share one multiplier. Both values must be within
// the signed 4-bit range [-8, 7].
struct HalfPair {
  std::int8_t w0 = 0;
  std::int8_t w1 = 0;
};

inline bool InHalfRange(int v) { return v >= -8 && v <= 7; }

// Shape of one add-tree instance. accumulator_bits is the width of one
// accumulator field (of each half, in split mode); it must cover
// product_bits + ceil(log2(fan_in)) so that no node of the tree can wrap.
struct AddTreeConfig {
  int fan_in = 16;
  int accumulator_bits = kBaseProductBits + 4;

  static AddTreeConfig ForProducts(int product_bits, int fan_in = 16);
  // Throws ValidationError if fan_in is not a power of two or the
  // accumulator is too narrow for the given product width.
  void Validate(int product_bits) const;
};

inline AddTreeConfig BaseTreeConfig() {
  return AddTreeConfig::ForProducts(kBaseProductBits);
}
inline AddTreeConfig HalfTreeConfig() {
  return AddTreeConfig::ForProducts(kHalfProductBits);
}

// One 8x8 signed multiplication; exact 16-bit-range product.
std::int32_t MulBase(std::int8_t a, std::int8_t w);

// Duplex half mode: two 8x4 signed multiplications sharing the operand a.
// Modelled as two narrow shift-add multiplier arrays fed from one
// multiplicand register, not as two independent 8x8 multiplies.
std::pair<std::int32_t, std::int32_t> MulDuplex(std::int8_t a, const HalfPair &w);

// Nibble packing used by the weight stream and the model file: w0 in the low
// nibble, w1 in the high nibble, both two's complement.
std::uint8_t PackHalfPair(const HalfPair &w);
HalfPair UnpackHalfPair(std::uint8_t byte);

// Base mode tree: one accumulation of cfg.fan_in product values.
// Throws on a wrong leaf count.
std::int64_t AddTreeBase(std::span<const std::int32_t> leaves,
                         const AddTreeConfig &cfg);

// Half mode tree: each adder is a single wide adder (2 x accumulator_bits)
// with the carry across the middle gated off, which unfolds the tree into two
// independent accumulations. Returns (sum of lo leaves, sum of hi leaves).
std::pair<std::int64_t, std::int64_t> AddTreeSplit(
    std::span<const std::int32_t> leaves_lo,
    std::span<const std::int32_t> leaves_hi, const AddTreeConfig &cfg);

// Tiled dot products as the NFU executes them: vectors are consumed
// fan_in elements per cycle and partial sums accumulate across cycles.
// Lengths must be equal and a multiple of cfg.fan_in.
std::int64_t DotBase(std::span<const std::int8_t> a,
                     std::span<const std::int8_t> w, const AddTreeConfig &cfg);

// Half mode: one input vector against two weight vectors (paired per
// element); yields the two neurons' partial sums.
std::pair<std::int64_t, std::int64_t> DotHalf(std::span<const std::int8_t> a,
                                              std::span<const HalfPair> w,
                                              const AddTreeConfig &cfg);

}  // namespace arith
}  // namespace dynprec

#endif  // DYNPREC_ARITH_NFU_H_
