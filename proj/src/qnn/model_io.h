// qnn/model_io.h

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

// Binary model file, little-endian:
//   magic "DPAM", u32 version, u32 layer count, i32 ctx_left, i32 ctx_right
//   per layer:
//     u32 in_dim, u32 out_dim, u8 activation, f64 act_in_scale,
//     f64 bias[out_dim],
//     f64 scale_8, i8 codes_8[out*in],
//     f64 scale_4, u8 codes_4_packed[out * ceil(in/2)]
// 4-bit codes are packed two per byte, low nibble first, per weight row.

#ifndef DYNPREC_QNN_MODEL_IO_H_
#define DYNPREC_QNN_MODEL_IO_H_

#include <string>

#include "qnn/model.h"

namespace dynprec {
namespace qnn {

void SaveModel(const QuantizedModel &model, const std::string &path);
QuantizedModel LoadModel(const std::string &path);

}  // namespace qnn
}  // namespace dynprec

#endif  // DYNPREC_QNN_MODEL_IO_H_
