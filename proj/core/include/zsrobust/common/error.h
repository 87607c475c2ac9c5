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

#ifndef ZSROBUST_COMMON_ERROR_H_
#define ZSROBUST_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace zsrobust {

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kUnsupported,
  kNumeric,
  kTransport,
  kIo,
  kConfig,
  kFormat,
};

std::string_view ErrorCodeName(ErrorCode code);

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& message)
      : Error(ErrorCode::kInvalidArgument, message) {}
};

class ShapeMismatchError : public Error {
 public:
  explicit ShapeMismatchError(const std::string& message)
      : Error(ErrorCode::kShapeMismatch, message) {}
};

// A model was asked for something it does not advertise, e.g. input
// gradients from a logits-only peer.
class UnsupportedCapabilityError : public Error {
 public:
  explicit UnsupportedCapabilityError(const std::string& message)
      : Error(ErrorCode::kUnsupported, message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message)
      : Error(ErrorCode::kNumeric, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorCode::kIo, message) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message)
      : Error(ErrorCode::kFormat, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCode::kConfig, message) {}
};

enum class TransportErrorKind {
  kHandshake,
  kVersionMismatch,
  kTimeout,
  kMalformedFrame,
  kClosed,
  kRemote,
};

std::string_view TransportErrorKindName(TransportErrorKind kind);

class TransportError : public Error {
 public:
  TransportError(TransportErrorKind kind, const std::string& message,
                 std::string remote_code = {})
      : Error(ErrorCode::kTransport, message),
        kind_(kind),
        remote_code_(std::move(remote_code)) {}

  TransportErrorKind kind() const { return kind_; }
  // The peer's `code` field for kRemote errors.
  const std::string& remote_code() const { return remote_code_; }

 private:
  TransportErrorKind kind_;
  std::string remote_code_;
};

}  // namespace zsrobust

#endif  // ZSROBUST_COMMON_ERROR_H_
