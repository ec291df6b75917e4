// qnn/quantize.h

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

#ifndef DYNPREC_QNN_QUANTIZE_H_
#define DYNPREC_QNN_QUANTIZE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace dynprec {
namespace qnn {

// Deterministic banker's rounding; ties go to the even integer.
double RoundHalfToEven(double x);

struct QuantizedTensor {
  std::vector<std::int8_t> codes;
  double scale = 1.0;
};

// Symmetric per-tensor linear quantization to `bits` (4 or 8):
// scale = max|w| / (2^(bits-1) - 1), codes = round-half-to-even(w / scale)
// clamped to the symmetric range. An all-zero tensor yields all-zero codes
// with scale 1.
QuantizedTensor QuantizeLinear(std::span<const double> weights, int bits);

// Activations are always quantized to 8 bits, whatever the weight precision.
std::vector<std::int8_t> QuantizeActivations(std::span<const double> v,
                                             double scale);

}  // namespace qnn
}  // namespace dynprec

#endif  // DYNPREC_QNN_QUANTIZE_H_
