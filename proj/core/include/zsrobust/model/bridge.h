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

#ifndef ZSROBUST_MODEL_BRIDGE_H_
#define ZSROBUST_MODEL_BRIDGE_H_

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/model/classifier.h"
#include "zsrobust/model/encoder.h"

namespace zsrobust {

inline constexpr int kBridgeProtocolVersion = 1;

// Tensor payloads on the wire: base64 of little-endian f32.
std::string EncodeTensorBase64(const double* values, std::size_t count);
std::string EncodeTensorBase64(const Vec& values);
std::string EncodeTensorBase64(const Image& image);
// Throws TransportError(kMalformedFrame) on bad base64 or a ragged length.
std::vector<double> DecodeTensorBase64(std::string_view text);

// A byte stream carrying newline-delimited JSON frames.
class FrameTransport {
 public:
  virtual ~FrameTransport() = default;
  virtual void SendLine(std::string_view line) = 0;
  // Blocks for at most `timeout_ms`; throws kTimeout / kClosed.
  virtual std::string ReceiveLine(int timeout_ms) = 0;
  virtual std::string Describe() const = 0;
};

// Runs `command` through /bin/sh and talks to its stdin/stdout.
std::unique_ptr<FrameTransport> SpawnSubprocessTransport(const std::string& command);
std::unique_ptr<FrameTransport> ConnectTcpTransport(const std::string& host, int port,
                                                    int timeout_ms);

struct BridgeOptions {
  int timeout_ms = 30000;
};

// Endpoints: "tcp:<host>:<port>" (or "tcp://<host>:<port>"); anything else
// is a shell command started as a subprocess.
std::unique_ptr<FrameTransport> OpenTransport(const std::string& endpoint,
                                              const BridgeOptions& options);

struct BridgeInfo {
  int protocol_version = 0;
  std::vector<std::string> classes;
  bool has_input_gradient = false;
  bool has_embeddings = false;
  ImageShape input;
  int embed_dim = 0;           // optional, required when has_embeddings
  double logit_scale = 100.0;  // optional
  std::string snapshot_id;     // optional
};

// Validates and parses an `info` payload. Missing or ill-typed fields throw
// kHandshake, a protocol other than 1 throws kVersionMismatch.
BridgeInfo ParseBridgeInfo(const nlohmann::json& data);

// One connection. Requests on a client are serialized.
class BridgeClient {
 public:
  BridgeClient(std::unique_ptr<FrameTransport> transport, BridgeOptions options);

  static std::unique_ptr<BridgeClient> Connect(const std::string& endpoint,
                                               const BridgeOptions& options);

  // Sends {id, method, ...fields} and returns the `data` member of a
  // successful response. ok:false becomes TransportError(kRemote) carrying
  // the peer's code.
  nlohmann::json Call(const std::string& method, nlohmann::json fields = nlohmann::json::object());

  const BridgeInfo& info() const { return info_; }
  std::string Describe() const { return transport_->Describe(); }

 private:
  std::unique_ptr<FrameTransport> transport_;
  BridgeOptions options_;
  std::mutex mu_;
  std::uint64_t next_id_ = 1;
  BridgeInfo info_;
};

// Pool of independent connections to one endpoint so parallel workers do
// not serialize on a single stream.
class BridgeConnectionPool {
 public:
  BridgeConnectionPool(std::string endpoint, BridgeOptions options);

  const BridgeInfo& info() const { return info_; }
  nlohmann::json Call(const std::string& method, nlohmann::json fields = nlohmann::json::object());
  const std::string& endpoint() const { return endpoint_; }

 private:
  std::unique_ptr<BridgeClient> Acquire();
  void Release(std::unique_ptr<BridgeClient> client);

  std::string endpoint_;
  BridgeOptions options_;
  BridgeInfo info_;
  std::mutex mu_;
  std::vector<std::unique_ptr<BridgeClient>> idle_;
};

std::vector<double> TensorFromData(const nlohmann::json& data, std::string_view key);

class RemoteClassifier final : public ClassifierModel {
 public:
  explicit RemoteClassifier(std::shared_ptr<BridgeConnectionPool> pool);

  int num_classes() const override { return static_cast<int>(info().classes.size()); }
  ImageShape input_shape() const override { return info().input; }
  std::vector<std::string> class_names() const override { return info().classes; }
  Vec Logits(const Image& image) const override;
  bool has_input_gradient() const override { return info().has_input_gradient; }
  Vec LossGradient(const Image& image, int label, LossDirection direction) const override;
  std::string snapshot_id() const override { return snapshot_id_; }

 private:
  const BridgeInfo& info() const { return pool_->info(); }

  std::shared_ptr<BridgeConnectionPool> pool_;
  std::string snapshot_id_;
};

class RemoteEncoder final : public TextImageEncoder {
 public:
  explicit RemoteEncoder(std::shared_ptr<BridgeConnectionPool> pool);

  int embed_dim() const override { return pool_->info().embed_dim; }
  ImageShape input_shape() const override { return pool_->info().input; }
  Vec EmbedImage(const Image& image) const override;
  Vec EmbedText(std::string_view text) const override;
  double logit_scale() const override { return pool_->info().logit_scale; }
  std::string snapshot_id() const override { return snapshot_id_; }

 private:
  Vec Normalized(std::vector<double> values, const char* what) const;

  std::shared_ptr<BridgeConnectionPool> pool_;
  std::string snapshot_id_;
};

struct ExternalModel {
  BridgeInfo info;
  std::shared_ptr<RemoteClassifier> classifier;  // null when the peer has no classes
  std::shared_ptr<RemoteEncoder> encoder;        // null without embeddings
};

ExternalModel ConnectExternalModel(const std::string& endpoint, const BridgeOptions& options = {});

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_BRIDGE_H_
