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

#include "zsrobust/attacks/diversity.h"

#include <algorithm>
#include <cmath>

#include "zsrobust/common/error.h"

namespace zsrobust {

Image ResizePad::Apply(const Image& image) const {
  Image out(height, width, 0.0);
  for (int c = 0; c < kImageChannels; ++c) {
    for (int y = 0; y < resized_height; ++y) {
      const int sy = y * height / resized_height;
      for (int x = 0; x < resized_width; ++x) {
        out.at(c, top + y, left + x) = image.at(c, sy, x * width / resized_width);
      }
    }
  }
  return out;
}

Vec ResizePad::Adjoint(const Vec& gradient) const {
  Vec out = Vec::Zero(gradient.size());
  const auto index = [this](int c, int y, int x) {
    return (static_cast<Eigen::Index>(c) * height + y) * width + x;
  };
  for (int c = 0; c < kImageChannels; ++c) {
    for (int y = 0; y < resized_height; ++y) {
      const int sy = y * height / resized_height;
      for (int x = 0; x < resized_width; ++x) {
        out(index(c, sy, x * width / resized_width)) += gradient(index(c, top + y, left + x));
      }
    }
  }
  return out;
}

ResizePad SampleResizePad(int height, int width, double min_scale, Rng& rng) {
  if (!(min_scale > 0 && min_scale <= 1)) {
    throw InvalidArgumentError("diversity min scale must be in (0, 1]");
  }
  std::uniform_real_distribution<double> scale_dist(min_scale, 1.0);
  const double s = scale_dist(rng);
  ResizePad t;
  t.height = height;
  t.width = width;
  t.resized_height = std::clamp(static_cast<int>(std::lround(s * height)), 1, height);
  t.resized_width = std::clamp(static_cast<int>(std::lround(s * width)), 1, width);
  t.top = std::uniform_int_distribution<int>(0, height - t.resized_height)(rng);
  t.left = std::uniform_int_distribution<int>(0, width - t.resized_width)(rng);
  return t;
}

}  // namespace zsrobust
