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

#include "zsrobust/model/bridge.h"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <boost/beast/core/detail/base64.hpp>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/common/hash.h"

namespace zsrobust {
namespace {

namespace b64 = boost::beast::detail::base64;

constexpr std::size_t kMaxFrameBytes = std::size_t{256} << 20;

[[noreturn]] void ThrowErrno(TransportErrorKind kind, const std::string& what) {
  throw TransportError(kind, what + ": " + std::strerror(errno));
}

// Writes all bytes without letting a closed peer raise SIGPIPE.
void WriteAll(int fd, std::string_view bytes, bool is_socket) {
  sigset_t pipe_set, old_set;
  sigemptyset(&pipe_set);
  sigaddset(&pipe_set, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);
  std::size_t done = 0;
  int saved_errno = 0;
  while (done < bytes.size()) {
    const ssize_t n = is_socket ? ::send(fd, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL)
                                : ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      saved_errno = errno;
      break;
    }
    done += static_cast<std::size_t>(n);
  }
  if (saved_errno == EPIPE) {
    timespec zero{0, 0};
    sigtimedwait(&pipe_set, nullptr, &zero);
  }
  pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
  if (saved_errno != 0) {
    errno = saved_errno;
    ThrowErrno(TransportErrorKind::kClosed, "write to bridge peer failed");
  }
}

// Buffered line reader over a file descriptor with a deadline.
class LineReader {
 public:
  std::string Read(int fd, int timeout_ms, const std::string& who) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (buffer_.size() > kMaxFrameBytes) {
        throw TransportError(TransportErrorKind::kMalformedFrame,
                             who + " sent a frame larger than the limit");
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                            deadline - std::chrono::steady_clock::now())
                            .count();
      if (left <= 0) {
        throw TransportError(TransportErrorKind::kTimeout,
                             who + " did not answer within " + std::to_string(timeout_ms) + " ms");
      }
      pollfd p{fd, POLLIN, 0};
      const int ready = ::poll(&p, 1, static_cast<int>(left));
      if (ready < 0) {
        if (errno == EINTR) continue;
        ThrowErrno(TransportErrorKind::kClosed, "poll on " + who);
      }
      if (ready == 0) continue;
      char chunk[65536];
      const ssize_t n = ::read(fd, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        ThrowErrno(TransportErrorKind::kClosed, "read from " + who);
      }
      if (n == 0) throw TransportError(TransportErrorKind::kClosed, who + " closed the stream");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  std::string buffer_;
};

class SubprocessTransport final : public FrameTransport {
 public:
  explicit SubprocessTransport(const std::string& command) : command_(command) {
    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) ThrowErrno(TransportErrorKind::kHandshake, "pipe");
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      ThrowErrno(TransportErrorKind::kHandshake, "pipe");
    }
    pid_ = ::fork();
    if (pid_ < 0) ThrowErrno(TransportErrorKind::kHandshake, "fork");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  ~SubprocessTransport() override {
    if (write_fd_ >= 0) ::close(write_fd_);
    // Give the peer a moment to exit on EOF, then make sure it is gone.
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 50 && !reaped; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        reaped = true;
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    }
    if (!reaped) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    if (read_fd_ >= 0) ::close(read_fd_);
  }

  void SendLine(std::string_view line) override {
    std::string frame(line);
    frame.push_back('\n');
    WriteAll(write_fd_, frame, false);
  }

  std::string ReceiveLine(int timeout_ms) override {
    return reader_.Read(read_fd_, timeout_ms, Describe());
  }

  std::string Describe() const override { return "subprocess '" + command_ + "'"; }

 private:
  std::string command_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  LineReader reader_;
};

class TcpTransport final : public FrameTransport {
 public:
  TcpTransport(const std::string& host, int port, int timeout_ms)
      : name_("tcp " + host + ":" + std::to_string(port)) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
    if (rc != 0) {
      throw TransportError(TransportErrorKind::kHandshake,
                           "cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai != nullptr && fd_ < 0; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd < 0) continue;
      if (ConnectWithTimeout(fd, ai->ai_addr, ai->ai_addrlen, timeout_ms, last_error)) {
        fd_ = fd;
      } else {
        ::close(fd);
      }
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) {
      throw TransportError(TransportErrorKind::kHandshake,
                           "cannot connect to " + name_ + ": " + last_error);
    }
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }

  ~TcpTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void SendLine(std::string_view line) override {
    std::string frame(line);
    frame.push_back('\n');
    WriteAll(fd_, frame, true);
  }

  std::string ReceiveLine(int timeout_ms) override { return reader_.Read(fd_, timeout_ms, name_); }

  std::string Describe() const override { return name_; }

 private:
  static bool ConnectWithTimeout(int fd, const sockaddr* addr, socklen_t len, int timeout_ms,
                                 std::string& error) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, addr, len);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd p{fd, POLLOUT, 0};
      rc = ::poll(&p, 1, timeout_ms);
      if (rc == 0) {
        error = "connect timed out";
        return false;
      }
      int so_error = 0;
      socklen_t so_len = sizeof(so_error);
      ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &so_error, &so_len);
      if (so_error != 0) {
        error = std::strerror(so_error);
        return false;
      }
      rc = 0;
    } else if (rc != 0) {
      error = std::strerror(errno);
      return false;
    }
    ::fcntl(fd, F_SETFL, flags);
    return true;
  }

  std::string name_;
  int fd_ = -1;
  LineReader reader_;
};

const nlohmann::json& RequireField(const nlohmann::json& data, const char* key,
                                   nlohmann::json::value_t type) {
  if (!data.is_object() || !data.contains(key)) {
    throw TransportError(TransportErrorKind::kHandshake,
                         std::string("bridge info lacks '") + key + "'");
  }
  const auto& v = data[key];
  const bool ok = v.type() == type ||
                  (type == nlohmann::json::value_t::number_integer && v.is_number_unsigned());
  if (!ok) {
    throw TransportError(TransportErrorKind::kHandshake,
                         std::string("bridge info field '") + key + "' has the wrong type");
  }
  return v;
}

std::string RemoteSnapshotId(const std::string& endpoint, const BridgeInfo& info,
                             std::string_view role) {
  if (!info.snapshot_id.empty()) return std::string(role) + ":" + info.snapshot_id;
  Sha256 h;
  h.Update(role).Update(endpoint);
  for (const auto& c : info.classes) h.UpdateU64(c.size()).Update(c);
  h.UpdateU64(static_cast<std::uint64_t>(info.input.height))
      .UpdateU64(static_cast<std::uint64_t>(info.input.width));
  return std::string(role) + ":" + h.HexDigest();
}

}  // namespace

std::string EncodeTensorBase64(const double* values, std::size_t count) {
  std::string raw(count * 4, '\0');
  auto* bytes = reinterpret_cast<std::uint8_t*>(raw.data());
  for (std::size_t i = 0; i < count; ++i) EncodeF32Le(static_cast<float>(values[i]), bytes + 4 * i);
  std::string out(b64::encoded_size(raw.size()), '\0');
  out.resize(b64::encode(out.data(), raw.data(), raw.size()));
  return out;
}

std::string EncodeTensorBase64(const Vec& values) {
  return EncodeTensorBase64(values.data(), static_cast<std::size_t>(values.size()));
}

std::string EncodeTensorBase64(const Image& image) {
  return EncodeTensorBase64(image.data().data(), image.size());
}

std::vector<double> DecodeTensorBase64(std::string_view text) {
  if (text.size() % 4 != 0) {
    throw TransportError(TransportErrorKind::kMalformedFrame, "base64 payload has a ragged length");
  }
  std::size_t padding = 0;
  while (padding < 2 && padding < text.size() && text[text.size() - 1 - padding] == '=') ++padding;
  std::string raw(b64::decoded_size(text.size()), '\0');
  const auto [written, read] = b64::decode(raw.data(), text.data(), text.size() - padding);
  if (read != text.size() - padding) {
    throw TransportError(TransportErrorKind::kMalformedFrame, "invalid base64 payload");
  }
  if (written % 4 != 0) {
    throw TransportError(TransportErrorKind::kMalformedFrame,
                         "tensor payload is not a whole number of f32 values");
  }
  std::vector<double> out(written / 4);
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(raw.data());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = DecodeF32Le(bytes + 4 * i);
  return out;
}

std::unique_ptr<FrameTransport> SpawnSubprocessTransport(const std::string& command) {
  return std::make_unique<SubprocessTransport>(command);
}

std::unique_ptr<FrameTransport> ConnectTcpTransport(const std::string& host, int port,
                                                    int timeout_ms) {
  return std::make_unique<TcpTransport>(host, port, timeout_ms);
}

std::unique_ptr<FrameTransport> OpenTransport(const std::string& endpoint,
                                              const BridgeOptions& options) {
  if (endpoint.empty()) throw InvalidArgumentError("empty bridge endpoint");
  std::string_view rest = endpoint;
  if (rest.starts_with("tcp://")) {
    rest.remove_prefix(6);
  } else if (rest.starts_with("tcp:")) {
    rest.remove_prefix(4);
  } else {
    return SpawnSubprocessTransport(endpoint);
  }
  const auto colon = rest.rfind(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgumentError("tcp endpoint '" + endpoint + "' lacks a port");
  }
  int port = 0;
  try {
    port = std::stoi(std::string(rest.substr(colon + 1)));
  } catch (const std::exception&) {
    throw InvalidArgumentError("tcp endpoint '" + endpoint + "' has a bad port");
  }
  std::string host(rest.substr(0, colon));
  if (host.empty()) host = "127.0.0.1";
  return ConnectTcpTransport(host, port, options.timeout_ms);
}

BridgeInfo ParseBridgeInfo(const nlohmann::json& data) {
  using VT = nlohmann::json::value_t;
  BridgeInfo info;
  info.protocol_version = RequireField(data, "protocol_version", VT::number_integer).get<int>();
  if (info.protocol_version != kBridgeProtocolVersion) {
    throw TransportError(TransportErrorKind::kVersionMismatch,
                         "peer speaks bridge protocol " + std::to_string(info.protocol_version) +
                             ", expected " + std::to_string(kBridgeProtocolVersion));
  }
  const auto& classes = RequireField(data, "classes", VT::array);
  for (const auto& c : classes) {
    if (!c.is_string()) {
      throw TransportError(TransportErrorKind::kHandshake, "bridge class names must be strings");
    }
    info.classes.push_back(c.get<std::string>());
  }
  info.has_input_gradient = RequireField(data, "has_input_gradient", VT::boolean).get<bool>();
  info.has_embeddings = RequireField(data, "has_embeddings", VT::boolean).get<bool>();
  const auto& input = RequireField(data, "input", VT::object);
  info.input.height = RequireField(input, "h", VT::number_integer).get<int>();
  info.input.width = RequireField(input, "w", VT::number_integer).get<int>();
  info.input.channels = RequireField(input, "c", VT::number_integer).get<int>();
  if (info.input.height <= 0 || info.input.width <= 0 || info.input.channels != kImageChannels) {
    throw TransportError(TransportErrorKind::kHandshake,
                         "bridge input shape " + info.input.ToString() + " is not supported");
  }
  if (info.has_embeddings) {
    info.embed_dim = RequireField(data, "embed_dim", VT::number_integer).get<int>();
    if (info.embed_dim <= 0) {
      throw TransportError(TransportErrorKind::kHandshake, "bridge embed_dim must be positive");
    }
  }
  if (data.contains("logit_scale")) {
    if (!data["logit_scale"].is_number() || !(data["logit_scale"].get<double>() > 0)) {
      throw TransportError(TransportErrorKind::kHandshake, "bridge logit_scale must be positive");
    }
    info.logit_scale = data["logit_scale"].get<double>();
  }
  if (data.contains("snapshot_id") && data["snapshot_id"].is_string()) {
    info.snapshot_id = data["snapshot_id"].get<std::string>();
  }
  if (info.classes.empty() && !info.has_embeddings) {
    throw TransportError(TransportErrorKind::kHandshake,
                         "peer offers neither classes nor embeddings");
  }
  return info;
}

BridgeClient::BridgeClient(std::unique_ptr<FrameTransport> transport, BridgeOptions options)
    : transport_(std::move(transport)), options_(options) {
  if (options_.timeout_ms <= 0) throw InvalidArgumentError("bridge timeout must be positive");
  nlohmann::json data;
  try {
    data = Call("info");
  } catch (const TransportError& e) {
    if (e.kind() == TransportErrorKind::kRemote) {
      throw TransportError(TransportErrorKind::kHandshake,
                           std::string("peer rejected info: ") + e.what(), e.remote_code());
    }
    throw;
  }
  info_ = ParseBridgeInfo(data);
}

std::unique_ptr<BridgeClient> BridgeClient::Connect(const std::string& endpoint,
                                                    const BridgeOptions& options) {
  return std::make_unique<BridgeClient>(OpenTransport(endpoint, options), options);
}

nlohmann::json BridgeClient::Call(const std::string& method, nlohmann::json fields) {
  std::lock_guard<std::mutex> lock(mu_);
  const std::uint64_t id = next_id_++;
  fields["id"] = id;
  fields["method"] = method;
  transport_->SendLine(fields.dump());
  const std::string line = transport_->ReceiveLine(options_.timeout_ms);
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw TransportError(TransportErrorKind::kMalformedFrame,
                         transport_->Describe() + " sent a frame that is not JSON");
  }
  if (!response.is_object() || !response.contains("ok") || !response["ok"].is_boolean()) {
    throw TransportError(TransportErrorKind::kMalformedFrame,
                         transport_->Describe() + " sent a response without a boolean 'ok'");
  }
  if (response.contains("id") && response["id"] != id) {
    throw TransportError(TransportErrorKind::kMalformedFrame,
                         "response id does not match request " + std::to_string(id));
  }
  if (!response["ok"].get<bool>()) {
    const std::string code = response.value("code", std::string("unknown"));
    const std::string message = response.value("message", std::string());
    throw TransportError(TransportErrorKind::kRemote,
                         method + " failed on peer: " + code + (message.empty() ? "" : ": ") +
                             message,
                         code);
  }
  if (!response.contains("data")) {
    throw TransportError(TransportErrorKind::kMalformedFrame, "successful response lacks 'data'");
  }
  return response["data"];
}

BridgeConnectionPool::BridgeConnectionPool(std::string endpoint, BridgeOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  auto first = BridgeClient::Connect(endpoint_, options_);
  info_ = first->info();
  idle_.push_back(std::move(first));
}

std::unique_ptr<BridgeClient> BridgeConnectionPool::Acquire() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!idle_.empty()) {
      auto client = std::move(idle_.back());
      idle_.pop_back();
      return client;
    }
  }
  auto client = BridgeClient::Connect(endpoint_, options_);
  if (client->info().classes != info_.classes || client->info().input != info_.input) {
    throw TransportError(TransportErrorKind::kHandshake,
                         "a second connection to " + endpoint_ + " reported a different model");
  }
  return client;
}

void BridgeConnectionPool::Release(std::unique_ptr<BridgeClient> client) {
  std::lock_guard<std::mutex> lock(mu_);
  idle_.push_back(std::move(client));
}

nlohmann::json BridgeConnectionPool::Call(const std::string& method, nlohmann::json fields) {
  auto client = Acquire();
  nlohmann::json data;
  try {
    data = client->Call(method, std::move(fields));
  } catch (const TransportError& e) {
    // A remote error leaves the stream in sync; anything else drops it.
    if (e.kind() == TransportErrorKind::kRemote) Release(std::move(client));
    throw;
  }
  Release(std::move(client));
  return data;
}

std::vector<double> TensorFromData(const nlohmann::json& data, std::string_view key) {
  const nlohmann::json* payload = &data;
  if (data.is_object()) {
    if (!data.contains(key)) {
      throw TransportError(TransportErrorKind::kMalformedFrame,
                           "response data lacks '" + std::string(key) + "'");
    }
    payload = &data[std::string(key)];
  }
  if (!payload->is_string()) {
    throw TransportError(TransportErrorKind::kMalformedFrame,
                         "tensor payload '" + std::string(key) + "' is not a base64 string");
  }
  return DecodeTensorBase64(payload->get<std::string>());
}

RemoteClassifier::RemoteClassifier(std::shared_ptr<BridgeConnectionPool> pool)
    : pool_(std::move(pool)) {
  if (pool_->info().classes.empty()) {
    throw UnsupportedCapabilityError("bridge peer declares no classes");
  }
  snapshot_id_ = RemoteSnapshotId(pool_->endpoint(), pool_->info(), "remote-classifier");
}

Vec RemoteClassifier::Logits(const Image& image) const {
  auto values = TensorFromData(pool_->Call("logits", {{"image", EncodeTensorBase64(image)}}),
                               "logits");
  if (static_cast<int>(values.size()) != num_classes()) {
    throw TransportError(TransportErrorKind::kMalformedFrame,
                         "peer returned " + std::to_string(values.size()) + " logits for " +
                             std::to_string(num_classes()) + " classes");
  }
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Vec RemoteClassifier::LossGradient(const Image& image, int label, LossDirection direction) const {
  if (!has_input_gradient()) {
    throw UnsupportedCapabilityError("bridge peer " + pool_->endpoint() +
                                     " does not provide input gradients");
  }
  auto values = TensorFromData(
      pool_->Call("grad_input",
                  {{"image", EncodeTensorBase64(image)},
                   {"label", label},
                   {"direction", direction == LossDirection::kMaximize ? "maximize" : "minimize"}}),
      "gradient");
  if (values.size() != image.size()) {
    throw TransportError(TransportErrorKind::kMalformedFrame,
                         "peer returned a gradient of the wrong size");
  }
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

RemoteEncoder::RemoteEncoder(std::shared_ptr<BridgeConnectionPool> pool) : pool_(std::move(pool)) {
  if (!pool_->info().has_embeddings) {
    throw UnsupportedCapabilityError("bridge peer does not provide embeddings");
  }
  snapshot_id_ = RemoteSnapshotId(pool_->endpoint(), pool_->info(), "remote-encoder");
}

Vec RemoteEncoder::Normalized(std::vector<double> values, const char* what) const {
  if (static_cast<int>(values.size()) != embed_dim()) {
    throw TransportError(TransportErrorKind::kMalformedFrame,
                         std::string(what) + " has the wrong dimension");
  }
  Vec e = Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
  const double norm = e.norm();
  if (!(norm > 0) || !std::isfinite(norm)) {
    throw NumericError(std::string(what) + " from peer has zero or non-finite norm");
  }
  return e / norm;
}

Vec RemoteEncoder::EmbedImage(const Image& image) const {
  return Normalized(
      TensorFromData(pool_->Call("embed_image", {{"image", EncodeTensorBase64(image)}}),
                     "embedding"),
      "image embedding");
}

Vec RemoteEncoder::EmbedText(std::string_view text) const {
  return Normalized(
      TensorFromData(pool_->Call("embed_text", {{"text", std::string(text)}}), "embedding"),
      "text embedding");
}

ExternalModel ConnectExternalModel(const std::string& endpoint, const BridgeOptions& options) {
  auto pool = std::make_shared<BridgeConnectionPool>(endpoint, options);
  ExternalModel model;
  model.info = pool->info();
  if (!model.info.classes.empty()) model.classifier = std::make_shared<RemoteClassifier>(pool);
  if (model.info.has_embeddings) model.encoder = std::make_shared<RemoteEncoder>(pool);
  return model;
}

}  // namespace zsrobust
