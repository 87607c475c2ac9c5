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

#include "zsrobust/common/dataset_io.h"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/error.h"

namespace zsrobust {
namespace {

constexpr char kRoztMagic[] = "ROZT";
constexpr std::uint32_t kRoztVersion = 1;

// Values loaded from f32 storage sit within ~1.5e-5 (scaled) of their level.
std::uint8_t To8Bit(double v, const std::filesystem::path& path) {
  const double scaled = v * 255.0;
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-4 || rounded < 0 || rounded > 255) {
    throw InvalidArgumentError("pixel " + std::to_string(v) +
                               " is not 8-bit representable; writing " + path.string());
  }
  return static_cast<std::uint8_t>(rounded);
}

std::string EntryFileName(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu.png", i);
  return buf;
}

}  // namespace

void WritePng(const std::filesystem::path& path, const Image& image) {
  const int h = image.height();
  const int w = image.width();
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(h) * w * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        rgb[(static_cast<std::size_t>(y) * w + x) * 3 + c] = To8Bit(image.at(c, y, x), path);
      }
    }
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(w);
  png.height = static_cast<png_uint_32>(h);
  png.format = PNG_FORMAT_RGB;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!png_image_write_to_file(&png, path.c_str(), 0, rgb.data(), 0, nullptr)) {
    throw IoError("png write failed for " + path.string() + ": " + png.message);
  }
}

Image ReadPng(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw IoError("png read failed for " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, rgb.data(), 0, nullptr)) {
    throw IoError("png decode failed for " + path.string() + ": " + png.message);
  }
  const int h = static_cast<int>(png.height);
  const int w = static_cast<int>(png.width);
  Image image(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        image.at(c, y, x) = rgb[(static_cast<std::size_t>(y) * w + x) * 3 + c] / 255.0;
      }
    }
  }
  return image;
}

std::string EncodeRozt(const RawTensor& tensor) {
  std::size_t count = 1;
  for (auto d : tensor.dims) count *= d;
  if (count != tensor.data.size()) {
    throw ShapeMismatchError("ROZT dims describe " + std::to_string(count) +
                             " values, payload has " + std::to_string(tensor.data.size()));
  }
  ByteWriter w;
  w.Bytes(std::string_view(kRoztMagic, 4));
  w.U32(kRoztVersion);
  w.U32(static_cast<std::uint32_t>(tensor.dims.size()));
  for (auto d : tensor.dims) w.U32(d);
  for (float v : tensor.data) w.F32(v);
  return w.Take();
}

RawTensor DecodeRozt(std::string_view bytes) {
  ByteReader r(bytes, "ROZT tensor");
  if (r.Bytes(4) != std::string_view(kRoztMagic, 4)) throw FormatError("bad ROZT magic");
  const std::uint32_t version = r.U32();
  if (version != kRoztVersion) {
    throw FormatError("unsupported ROZT version " + std::to_string(version));
  }
  RawTensor t;
  const std::uint32_t rank = r.U32();
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    t.dims.push_back(r.U32());
    count *= t.dims.back();
  }
  if (r.remaining() != count * 4) {
    throw FormatError("ROZT payload size does not match dims");
  }
  t.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) t.data[i] = r.F32();
  return t;
}

void WriteRozt(const std::filesystem::path& path, const RawTensor& tensor) {
  WriteFileBytes(path, EncodeRozt(tensor));
}

RawTensor ReadRozt(const std::filesystem::path& path) { return DecodeRozt(ReadFileBytes(path)); }

void SaveDataset(const std::filesystem::path& dir, const Dataset& dataset,
                 const nlohmann::json& generator, DatasetStorage storage) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["version"] = kDatasetManifestVersion;
  manifest["name"] = dataset.name();
  manifest["class_names"] = dataset.class_names();
  manifest["storage"] = storage == DatasetStorage::kPng ? "png" : "rozt";
  nlohmann::json entries = nlohmann::json::array();
  if (storage == DatasetStorage::kPng) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto& ex = dataset[i];
      const std::string file = EntryFileName(i);
      WritePng(dir / file, ex.image);
      nlohmann::json e = {{"file", file}, {"label", ex.label}};
      if (ex.target) e["target"] = *ex.target;
      entries.push_back(std::move(e));
    }
  } else {
    RawTensor t;
    if (!dataset.empty()) {
      const ImageShape s = dataset.input_shape();
      t.dims = {static_cast<std::uint32_t>(dataset.size()), 3u,
                static_cast<std::uint32_t>(s.height), static_cast<std::uint32_t>(s.width)};
    } else {
      t.dims = {0u, 3u, 0u, 0u};
    }
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto& ex = dataset[i];
      for (double v : ex.image.data()) t.data.push_back(static_cast<float>(v));
      nlohmann::json e = {{"file", "images.rozt"}, {"index", i}, {"label", ex.label}};
      if (ex.target) e["target"] = *ex.target;
      entries.push_back(std::move(e));
    }
    WriteRozt(dir / "images.rozt", t);
  }
  manifest["entries"] = std::move(entries);
  manifest["generator"] = generator;
  manifest["content_hash"] = dataset.ContentHash();
  WriteFileBytes(dir / "manifest.json", manifest.dump(2) + "\n");
}

nlohmann::json LoadDatasetManifest(const std::filesystem::path& dir) {
  const std::string text = ReadFileBytes(dir / "manifest.json");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed manifest in " + dir.string() + ": " + e.what());
  }
  if (manifest.value("version", 0) != kDatasetManifestVersion) {
    throw FormatError("unsupported dataset manifest version in " + dir.string());
  }
  return manifest;
}

Dataset LoadDataset(const std::filesystem::path& dir) {
  const nlohmann::json manifest = LoadDatasetManifest(dir);
  try {
    Dataset ds(manifest.value("name", dir.filename().string()),
               manifest.at("class_names").get<std::vector<std::string>>());
    const std::string storage = manifest.value("storage", "png");
    RawTensor tensor;
    if (storage == "rozt") tensor = ReadRozt(dir / "images.rozt");
    for (const auto& e : manifest.at("entries")) {
      LabeledExample ex;
      ex.label = e.at("label").get<int>();
      if (e.contains("target")) ex.target = e.at("target").get<int>();
      if (storage == "png") {
        ex.image = ReadPng(dir / e.at("file").get<std::string>());
      } else {
        const auto index = e.at("index").get<std::size_t>();
        const int h = static_cast<int>(tensor.dims.at(2));
        const int w = static_cast<int>(tensor.dims.at(3));
        const std::size_t n = static_cast<std::size_t>(3) * h * w;
        if ((index + 1) * n > tensor.data.size()) throw FormatError("ROZT index out of range");
        std::vector<double> data(tensor.data.begin() + static_cast<std::ptrdiff_t>(index * n),
                                 tensor.data.begin() + static_cast<std::ptrdiff_t>((index + 1) * n));
        ex.image = Image(h, w, std::move(data));
      }
      ds.Add(std::move(ex));
    }
    ds.Validate();
    const std::string expected = manifest.value("content_hash", "");
    if (!expected.empty() && expected != ds.ContentHash()) {
      throw FormatError("content hash mismatch for dataset in " + dir.string());
    }
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed manifest in " + dir.string() + ": " + e.what());
  }
}

std::vector<std::string> Cifar10ClassNames() {
  return {"airplane", "automobile", "bird", "cat", "deer",
          "dog", "frog", "horse", "ship", "truck"};
}

Dataset ReadCifar10Binary(const std::filesystem::path& path,
                          std::vector<std::string> class_names) {
  if (class_names.empty()) class_names = Cifar10ClassNames();
  const std::string bytes = ReadFileBytes(path);
  constexpr std::size_t kRecord = 1 + 3072;
  if (bytes.size() % kRecord != 0) {
    throw FormatError("CIFAR-10 file size " + std::to_string(bytes.size()) +
                      " is not a multiple of 3073");
  }
  Dataset ds(path.stem().string(), std::move(class_names));
  for (std::size_t off = 0; off < bytes.size(); off += kRecord) {
    LabeledExample ex;
    ex.label = static_cast<std::uint8_t>(bytes[off]);
    if (ex.label >= ds.num_classes()) throw FormatError("CIFAR-10 label out of range");
    std::vector<double> data(3072);
    for (std::size_t i = 0; i < 3072; ++i) {
      data[i] = static_cast<std::uint8_t>(bytes[off + 1 + i]) / 255.0;
    }
    ex.image = Image(32, 32, std::move(data));
    ds.Add(std::move(ex));
  }
  return ds;
}

}  // namespace zsrobust
