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

#ifndef ZSROBUST_COMMON_DATASET_IO_H_
#define ZSROBUST_COMMON_DATASET_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/common/dataset.h"

namespace zsrobust {

enum class DatasetStorage { kPng, kRozt };

inline constexpr int kDatasetManifestVersion = 1;

// Writes `dataset` under `dir`: one 8-bit RGB PNG per example (or a single
// images.rozt tensor) plus manifest.json
//   {version, name, class_names, entries:[{file, label, target?}],
//    generator, content_hash, storage}.
// PNG storage requires 8-bit quantized pixels and throws otherwise.
void SaveDataset(const std::filesystem::path& dir, const Dataset& dataset,
                 const nlohmann::json& generator = nlohmann::json::object(),
                 DatasetStorage storage = DatasetStorage::kPng);

// Loads a dataset directory and verifies the recorded content hash.
Dataset LoadDataset(const std::filesystem::path& dir);
nlohmann::json LoadDatasetManifest(const std::filesystem::path& dir);

void WritePng(const std::filesystem::path& path, const Image& image);
Image ReadPng(const std::filesystem::path& path);

// ROZT raw tensor: magic "ROZT", u32 version, u32 rank, u32 dims[rank],
// little-endian f32 payload.
struct RawTensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
};
std::string EncodeRozt(const RawTensor& tensor);
RawTensor DecodeRozt(std::string_view bytes);
void WriteRozt(const std::filesystem::path& path, const RawTensor& tensor);
RawTensor ReadRozt(const std::filesystem::path& path);

// CIFAR-10 binary batches: records of 1 label byte followed by 3072 pixel
// bytes (1024 R, 1024 G, 1024 B, row-major 32x32).
Dataset ReadCifar10Binary(const std::filesystem::path& path,
                          std::vector<std::string> class_names = {});
std::vector<std::string> Cifar10ClassNames();

}  // namespace zsrobust

#endif  // ZSROBUST_COMMON_DATASET_IO_H_
