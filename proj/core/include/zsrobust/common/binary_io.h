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

#ifndef ZSROBUST_COMMON_BINARY_IO_H_
#define ZSROBUST_COMMON_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

namespace zsrobust {

// Little-endian helpers shared by the ROZM/ROZT/ROZE container formats.

inline void EncodeF32Le(float value, std::uint8_t* out) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

inline float DecodeF32Le(const std::uint8_t* in) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

class ByteWriter {
 public:
  void U32(std::uint32_t v);
  void U64(std::uint64_t v);
  void F32(double v);
  void Bytes(std::string_view bytes);
  // u32 length followed by the bytes.
  void String(std::string_view s);

  const std::string& buffer() const { return buffer_; }
  std::string Take() { return std::move(buffer_); }

 private:
  std::string buffer_;
};

// Bounds-checked reader; every overrun throws FormatError naming `what`.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string what)
      : data_(data), what_(std::move(what)) {}

  std::uint32_t U32();
  std::uint64_t U64();
  float F32();
  std::string_view Bytes(std::size_t n);
  std::string String();
  bool AtEnd() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(std::size_t n) const;

  std::string_view data_;
  std::string what_;
  std::size_t pos_ = 0;
};

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace zsrobust

#endif  // ZSROBUST_COMMON_BINARY_IO_H_
