// util/binio.h

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

// Little-endian binary stream helpers for the feature and model file
// formats. The build targets little-endian hosts; a static_assert guards it.

#ifndef DYNPREC_UTIL_BINIO_H_
#define DYNPREC_UTIL_BINIO_H_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "util/errors.h"

namespace dynprec {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts unsupported");

template <typename T>
void PutRaw(std::ostream &os, const T &v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T GetRaw(std::istream &is, const char *what) {
  T v{};
  is.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (!is) throw IoError(std::string("truncated file while reading ") + what);
  return v;
}

inline void PutBytes(std::ostream &os, const void *data, std::size_t n) {
  os.write(static_cast<const char *>(data), static_cast<std::streamsize>(n));
}

inline void GetBytes(std::istream &is, void *data, std::size_t n,
                     const char *what) {
  is.read(static_cast<char *>(data), static_cast<std::streamsize>(n));
  if (!is) throw IoError(std::string("truncated file while reading ") + what);
}

}  // namespace dynprec

#endif  // DYNPREC_UTIL_BINIO_H_
