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

#include "zsrobust/common/image.h"

#include <algorithm>
#include <cmath>

#include "zsrobust/common/error.h"

namespace zsrobust {

std::string ImageShape::ToString() const {
  return std::to_string(channels) + "x" + std::to_string(height) + "x" +
         std::to_string(width);
}

Image::Image(int height, int width, double fill)
    : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw InvalidArgumentError("image dimensions must be positive, got " +
                               std::to_string(height) + "x" +
                               std::to_string(width));
  }
  data_.assign(static_cast<std::size_t>(kImageChannels) * height * width, fill);
}

Image::Image(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height <= 0 || width <= 0) {
    throw InvalidArgumentError("image dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(kImageChannels) * height * width) {
    throw ShapeMismatchError("image data length " + std::to_string(data_.size()) +
                             " does not match 3x" + std::to_string(height) + "x" +
                             std::to_string(width));
  }
}

void Image::Validate() const {
  if (height_ <= 0 || width_ <= 0 ||
      data_.size() != static_cast<std::size_t>(kImageChannels) * height_ * width_) {
    throw ShapeMismatchError("inconsistent image dimensions");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double v = data_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InvalidArgumentError("image element " + std::to_string(i) +
                                 " outside [0,1]: " + std::to_string(v));
    }
  }
}

void Image::ClampToUnit() {
  for (double& v : data_) v = std::clamp(v, 0.0, 1.0);
}

void Image::QuantizeTo8Bit() {
  for (double& v : data_) {
    v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  }
}

double LinfDistance(const Image& a, const Image& b) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatchError("linf distance between " + a.shape().ToString() +
                             " and " + b.shape().ToString());
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  }
  return d;
}

}  // namespace zsrobust
