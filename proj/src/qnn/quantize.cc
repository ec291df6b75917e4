// qnn/quantize.cc

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

#include "qnn/quantize.h"

#include <algorithm>
#include <cmath>

#include "util/errors.h"

namespace dynprec {
namespace qnn {

double RoundHalfToEven(double x) {
  const double f = std::floor(x);
  const double d = x - f;
  if (d > 0.5) return f + 1.0;
  if (d < 0.5) return f;
  return (std::fmod(f, 2.0) == 0.0) ? f : f + 1.0;
}

QuantizedTensor QuantizeLinear(std::span<const double> weights, int bits) {
  if (bits != 4 && bits != 8) {
    throw ValidationError("QuantizeLinear: bits must be 4 or 8");
  }
  const double qmax = static_cast<double>((1 << (bits - 1)) - 1);

  double max_abs = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) {
      throw ValidationError("QuantizeLinear: weights must be finite");
    }
    max_abs = std::max(max_abs, std::fabs(w));
  }

  QuantizedTensor out;
  out.codes.resize(weights.size(), 0);
  if (max_abs == 0.0) {
    out.scale = 1.0;  // degenerate all-zero tensor
    return out;
  }
  out.scale = max_abs / qmax;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double q = RoundHalfToEven(weights[i] / out.scale);
    out.codes[i] = static_cast<std::int8_t>(std::clamp(q, -qmax, qmax));
  }
  return out;
}

std::vector<std::int8_t> QuantizeActivations(std::span<const double> v,
                                             double scale) {
  if (!(scale > 0.0)) {
    throw ValidationError("QuantizeActivations: scale must be positive");
  }
  std::vector<std::int8_t> codes(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double q = RoundHalfToEven(v[i] / scale);
    codes[i] = static_cast<std::int8_t>(std::clamp(q, -127.0, 127.0));
  }
  return codes;
}

}  // namespace qnn
}  // namespace dynprec
