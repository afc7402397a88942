/*
 * Copyright 2026 The Crashkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CRASHKIT_ERROR_H_
#define CRASHKIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace crashkit {

// Stable error codes. The CLI prints `code_name(code)` on standard error, so
// the spelling of existing names must not change.
enum class ErrorCode {
  kUsage,
  kIo,
  kSchemaMismatch,
  kParse,
  kOutOfRange,
  kOutOfDomain,
  kNonConvergence,
  kInvalidZoom,
  kTemplate,
  kEmptyBucket,
  kDimensionMismatch,
  kLengthMismatch,
  kUnknownLabel,
  kEmptyMatrix,
  kMissingCell,
  kTransport,
  kInvalidLabel,
  kTimeout,
  kEmptyComplement,
  kInvalidArgument,
};

std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by parse_table for a malformed data line. `line_no` is 1-based and
// counts the header line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line_no, const std::string& message)
      : Error(ErrorCode::kParse,
              "line " + std::to_string(line_no) + ": " + message),
        line_no_(line_no) {}

  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

}  // namespace crashkit

#endif  // CRASHKIT_ERROR_H_
