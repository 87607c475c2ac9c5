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

#ifndef ZSROBUST_COMMON_IMAGE_H_
#define ZSROBUST_COMMON_IMAGE_H_

#include <cstddef>
#include <string>
#include <vector>

namespace zsrobust {

inline constexpr int kImageChannels = 3;

struct ImageShape {
  int height = 0;
  int width = 0;
  int channels = kImageChannels;

  std::size_t size() const {
    return static_cast<std::size_t>(height) * width * channels;
  }
  bool operator==(const ImageShape&) const = default;
  std::string ToString() const;
};

// Dense 3-channel image with values in [0,1], channel-major (C, H, W).
class Image {
 public:
  Image() = default;
  Image(int height, int width, double fill = 0.0);
  Image(int height, int width, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  static constexpr int channels() { return kImageChannels; }
  ImageShape shape() const { return {height_, width_, kImageChannels}; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int c, int y, int x) { return data_[Index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[Index(c, y, x)]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }

  // Throws InvalidArgumentError if any element is outside [0,1] or not
  // finite, or the dimensions are inconsistent.
  void Validate() const;

  void ClampToUnit();
  // Rounds every value to the nearest multiple of 1/255.
  void QuantizeTo8Bit();

  bool operator==(const Image& other) const = default;

 private:
  std::size_t Index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

double LinfDistance(const Image& a, const Image& b);

}  // namespace zsrobust

#endif  // ZSROBUST_COMMON_IMAGE_H_
