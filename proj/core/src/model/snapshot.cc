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

#include "zsrobust/model/snapshot.h"

#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/common/hash.h"
#include "zsrobust/model/dual_encoder.h"
#include "zsrobust/model/network.h"

namespace zsrobust {
namespace {

constexpr std::string_view kMagic = "ROZM";

nlohmann::json ShapeJson(const ImageShape& s) {
  return {{"h", s.height}, {"w", s.width}, {"c", s.channels}};
}

ImageShape ShapeFromJson(const nlohmann::json& j) {
  ImageShape s{j.at("h").get<int>(), j.at("w").get<int>(), j.at("c").get<int>()};
  if (s.height <= 0 || s.width <= 0 || s.channels != kImageChannels) {
    throw FormatError("snapshot input shape " + s.ToString() + " is invalid");
  }
  return s;
}

nlohmann::json ParameterManifest(const ParameterSet& params) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& name : params.names()) {
    const Mat& m = params.Get(name);
    list.push_back({{"name", name}, {"shape", {m.rows(), m.cols()}}});
  }
  return list;
}

void ExpectKind(const ModelSnapshot& s, std::string_view kind) {
  if (SnapshotKind(s) != kind) {
    throw FormatError("snapshot holds a " + SnapshotKind(s) + ", expected " + std::string(kind));
  }
}

}  // namespace

std::string SerializeSnapshot(const ModelSnapshot& snapshot) {
  nlohmann::json manifest = snapshot.manifest;
  manifest["parameters"] = ParameterManifest(snapshot.params);
  const std::string text = manifest.dump();
  ByteWriter w;
  w.Bytes(kMagic);
  w.U32(kSnapshotVersion);
  w.U32(static_cast<std::uint32_t>(text.size()));
  w.Bytes(text);
  for (const auto& name : snapshot.params.names()) {
    const Mat& m = snapshot.params.Get(name);
    w.U64(static_cast<std::uint64_t>(m.size()) * 4);
    for (Eigen::Index i = 0; i < m.size(); ++i) w.F32(m.data()[i]);
  }
  return w.Take();
}

ModelSnapshot DeserializeSnapshot(std::string_view bytes) {
  ByteReader r(bytes, "model snapshot");
  if (r.Bytes(4) != kMagic) throw FormatError("not a model snapshot (bad magic)");
  const std::uint32_t version = r.U32();
  if (version != kSnapshotVersion) {
    throw FormatError("unsupported snapshot version " + std::to_string(version));
  }
  const std::uint32_t manifest_len = r.U32();
  ModelSnapshot s;
  try {
    s.manifest = nlohmann::json::parse(r.Bytes(manifest_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("snapshot manifest is not JSON: ") + e.what());
  }
  if (!s.manifest.contains("parameters") || !s.manifest["parameters"].is_array()) {
    throw FormatError("snapshot manifest lacks a parameter list");
  }
  for (const auto& entry : s.manifest["parameters"]) {
    const auto name = entry.at("name").get<std::string>();
    const auto rows = entry.at("shape").at(0).get<Eigen::Index>();
    const auto cols = entry.at("shape").at(1).get<Eigen::Index>();
    if (rows < 0 || cols < 0) throw FormatError("negative shape for parameter " + name);
    const std::uint64_t len = r.U64();
    if (len != static_cast<std::uint64_t>(rows * cols) * 4) {
      throw FormatError("parameter " + name + " blob length does not match its shape");
    }
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.F32();
    s.params.Add(name, std::move(m));
  }
  if (!r.AtEnd()) throw FormatError("trailing bytes after snapshot parameters");
  s.manifest.erase("parameters");
  return s;
}

std::string SnapshotId(const ModelSnapshot& snapshot) {
  return Sha256Hex(SerializeSnapshot(snapshot));
}

void SaveSnapshot(const std::filesystem::path& path, const ModelSnapshot& snapshot) {
  WriteFileBytes(path, SerializeSnapshot(snapshot));
}

ModelSnapshot LoadSnapshot(const std::filesystem::path& path) {
  return DeserializeSnapshot(ReadFileBytes(path));
}

std::string SnapshotKind(const ModelSnapshot& snapshot) {
  if (!snapshot.manifest.contains("kind")) throw FormatError("snapshot manifest lacks 'kind'");
  return snapshot.manifest["kind"].get<std::string>();
}

ModelSnapshot ClassifierToSnapshot(const NetworkClassifier& model) {
  ModelSnapshot s;
  s.manifest = {{"kind", "classifier"},
                {"arch", ArchSpecToJson(model.arch())},
                {"input", ShapeJson(model.input_shape())},
                {"class_names", model.class_names()}};
  s.params = model.params();
  return s;
}

ModelSnapshot DualEncoderToSnapshot(const DualEncoder& encoder) {
  ModelSnapshot s;
  s.manifest = {{"kind", "dual_encoder"},
                {"arch", ArchSpecToJson(encoder.arch())},
                {"input", ShapeJson(encoder.input_shape())},
                {"embed_dim", encoder.embed_dim()},
                {"vocab", encoder.tokenizer().vocab()}};
  s.params = encoder.params();
  return s;
}

std::shared_ptr<NetworkClassifier> ClassifierFromSnapshot(const ModelSnapshot& snapshot) {
  ExpectKind(snapshot, "classifier");
  try {
    const auto& m = snapshot.manifest;
    return std::make_shared<NetworkClassifier>(
        ArchSpecFromJson(m.at("arch")), ShapeFromJson(m.at("input")),
        m.at("class_names").get<std::vector<std::string>>(), snapshot.params);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("classifier snapshot manifest: ") + e.what());
  }
}

std::shared_ptr<DualEncoder> DualEncoderFromSnapshot(const ModelSnapshot& snapshot) {
  ExpectKind(snapshot, "dual_encoder");
  try {
    const auto& m = snapshot.manifest;
    return std::make_shared<DualEncoder>(
        ArchSpecFromJson(m.at("arch")), ShapeFromJson(m.at("input")), m.at("embed_dim").get<int>(),
        Tokenizer(m.at("vocab").get<std::vector<std::string>>()), snapshot.params);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("dual encoder snapshot manifest: ") + e.what());
  }
}

}  // namespace zsrobust
