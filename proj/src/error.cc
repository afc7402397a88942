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

#include "crashkit/error.h"

namespace crashkit {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "E_USAGE";
    case ErrorCode::kIo: return "E_IO";
    case ErrorCode::kSchemaMismatch: return "E_SCHEMA_MISMATCH";
    case ErrorCode::kParse: return "E_PARSE";
    case ErrorCode::kOutOfRange: return "E_OUT_OF_RANGE";
    case ErrorCode::kOutOfDomain: return "E_OUT_OF_DOMAIN";
    case ErrorCode::kNonConvergence: return "E_NON_CONVERGENCE";
    case ErrorCode::kInvalidZoom: return "E_INVALID_ZOOM";
    case ErrorCode::kTemplate: return "E_TEMPLATE";
    case ErrorCode::kEmptyBucket: return "E_EMPTY_BUCKET";
    case ErrorCode::kDimensionMismatch: return "E_DIMENSION_MISMATCH";
    case ErrorCode::kLengthMismatch: return "E_LENGTH_MISMATCH";
    case ErrorCode::kUnknownLabel: return "E_UNKNOWN_LABEL";
    case ErrorCode::kEmptyMatrix: return "E_EMPTY_MATRIX";
    case ErrorCode::kMissingCell: return "E_MISSING_CELL";
    case ErrorCode::kTransport: return "E_TRANSPORT";
    case ErrorCode::kInvalidLabel: return "E_INVALID_LABEL";
    case ErrorCode::kTimeout: return "E_TIMEOUT";
    case ErrorCode::kEmptyComplement: return "E_EMPTY_COMPLEMENT";
    case ErrorCode::kInvalidArgument: return "E_INVALID_ARGUMENT";
  }
  return "E_UNKNOWN";
}

}  // namespace crashkit
