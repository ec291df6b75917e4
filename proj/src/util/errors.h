// util/errors.h

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

#ifndef DYNPREC_UTIL_ERRORS_H_
#define DYNPREC_UTIL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dynprec {

// Error categories. The numeric values double as process exit codes and as
// C API status codes: 0 ok, 1 usage, 2 validation, 3 decode failure, 4 I/O.
enum class StatusCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kDecodeFailure = 3,
  kIo = 4,
};

class Error : public std::runtime_error {
 public:
  Error(StatusCode code, const std::string &msg)
      : std::runtime_error(msg), code_(code) {}
  StatusCode code() const { return code_; }

 private:
  StatusCode code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string &msg) : Error(StatusCode::kUsage, msg) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &msg)
      : Error(StatusCode::kValidation, msg) {}
};

class DecodeError : public Error {
 public:
  explicit DecodeError(const std::string &msg)
      : Error(StatusCode::kDecodeFailure, msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string &msg) : Error(StatusCode::kIo, msg) {}
};

}  // namespace dynprec

#endif  // DYNPREC_UTIL_ERRORS_H_
