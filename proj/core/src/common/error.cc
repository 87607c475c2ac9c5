// Copyright 2026 The zsrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zsrobust/common/error.h"

namespace zsrobust {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kShapeMismatch:
      return "shape_mismatch";
    case ErrorCode::kUnsupported:
      return "unsupported";
    case ErrorCode::kNumeric:
      return "numeric";
    case ErrorCode::kTransport:
      return "transport";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kConfig:
      return "config";
    case ErrorCode::kFormat:
      return "format";
  }
  return "unknown";
}

std::string_view TransportErrorKindName(TransportErrorKind kind) {
  switch (kind) {
    case TransportErrorKind::kHandshake:
      return "handshake";
    case TransportErrorKind::kVersionMismatch:
      return "version_mismatch";
    case TransportErrorKind::kTimeout:
      return "timeout";
    case TransportErrorKind::kMalformedFrame:
      return "malformed_frame";
    case TransportErrorKind::kClosed:
      return "closed";
    case TransportErrorKind::kRemote:
      return "remote";
  }
  return "unknown";
}

}  // namespace zsrobust
