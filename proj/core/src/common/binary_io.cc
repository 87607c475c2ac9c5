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

#include "zsrobust/common/binary_io.h"

#include <fstream>
#include <sstream>

#include "zsrobust/common/error.h"

namespace zsrobust {

void ByteWriter::U32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buffer_.push_back(static_cast<char>(v >> (8 * i)));
}

void ByteWriter::U64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buffer_.push_back(static_cast<char>(v >> (8 * i)));
}

void ByteWriter::F32(double v) {
  std::uint8_t bytes[4];
  EncodeF32Le(static_cast<float>(v), bytes);
  buffer_.append(reinterpret_cast<const char*>(bytes), 4);
}

void ByteWriter::Bytes(std::string_view bytes) { buffer_.append(bytes); }

void ByteWriter::String(std::string_view s) {
  U32(static_cast<std::uint32_t>(s.size()));
  Bytes(s);
}

void ByteReader::Need(std::size_t n) const {
  if (data_.size() - pos_ < n) {
    throw FormatError(what_ + ": truncated at byte " + std::to_string(pos_));
  }
}

std::uint32_t ByteReader::U32() {
  Need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
  }
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::U64() {
  Need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
  }
  pos_ += 8;
  return v;
}

float ByteReader::F32() {
  Need(4);
  const float v = DecodeF32Le(reinterpret_cast<const std::uint8_t*>(data_.data() + pos_));
  pos_ += 4;
  return v;
}

std::string_view ByteReader::Bytes(std::size_t n) {
  Need(n);
  auto out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::String() {
  const std::uint32_t n = U32();
  return std::string(Bytes(n));
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace zsrobust
