// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mvlf {

enum class ErrorCode {
  kArgument = 1,
  kIo = 2,
  kParse = 3,
  kSchema = 4,
  kConfig = 5,
  kState = 6,
  kFingerprint = 7,
  kData = 8,
  kNumeric = 9,
  kDimension = 10,
  kInternal = 99,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library. The code survives the C boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mvlf
