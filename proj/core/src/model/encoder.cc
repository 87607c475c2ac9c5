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

#include "zsrobust/model/encoder.h"

#include <cmath>

#include "zsrobust/common/error.h"

namespace zsrobust {

Vec TextImageEncoder::EmbedImageVjp(const Image&, const Vec&) const {
  throw UnsupportedCapabilityError("encoder does not expose image gradients");
}

Vec CheckedEmbedImage(const ImageEmbedder& embedder, const Image& image) {
  if (image.shape() != embedder.input_shape()) {
    throw ShapeMismatchError("image " + image.shape().ToString() + " does not match encoder input " +
                             embedder.input_shape().ToString());
  }
  Vec e = embedder.EmbedImage(image);
  if (e.size() != embedder.embed_dim()) {
    throw ShapeMismatchError("embedding has " + std::to_string(e.size()) + " entries, expected " +
                             std::to_string(embedder.embed_dim()));
  }
  if (!e.allFinite() || std::abs(e.norm() - 1.0) > 1e-6) {
    throw NumericError("image embedding is not unit norm");
  }
  return e;
}

}  // namespace zsrobust
