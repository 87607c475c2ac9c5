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

#ifndef ZSROBUST_MODEL_SNAPSHOT_H_
#define ZSROBUST_MODEL_SNAPSHOT_H_

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "zsrobust/model/parameters.h"

namespace zsrobust {

class NetworkClassifier;
class DualEncoder;

inline constexpr std::uint32_t kSnapshotVersion = 1;

// On disk: "ROZM" | u32 version | u32 manifest length | manifest JSON |
// per parameter (manifest order): u64 byte length | little-endian f32 values.
// The manifest records the model kind, architecture and parameter shapes.
struct ModelSnapshot {
  nlohmann::json manifest;
  ParameterSet params;
};

std::string SerializeSnapshot(const ModelSnapshot& snapshot);
ModelSnapshot DeserializeSnapshot(std::string_view bytes);
// sha256 of the serialized bytes.
std::string SnapshotId(const ModelSnapshot& snapshot);

void SaveSnapshot(const std::filesystem::path& path, const ModelSnapshot& snapshot);
ModelSnapshot LoadSnapshot(const std::filesystem::path& path);

// "classifier" or "dual_encoder".
std::string SnapshotKind(const ModelSnapshot& snapshot);

ModelSnapshot ClassifierToSnapshot(const NetworkClassifier& model);
ModelSnapshot DualEncoderToSnapshot(const DualEncoder& encoder);
std::shared_ptr<NetworkClassifier> ClassifierFromSnapshot(const ModelSnapshot& snapshot);
std::shared_ptr<DualEncoder> DualEncoderFromSnapshot(const ModelSnapshot& snapshot);

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_SNAPSHOT_H_
