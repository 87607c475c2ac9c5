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

#ifndef ZSROBUST_MODEL_ENCODER_H_
#define ZSROBUST_MODEL_ENCODER_H_

#include <string>
#include <string_view>

#include "zsrobust/common/image.h"
#include "zsrobust/common/tensor.h"

namespace zsrobust {

// Anything that maps an image to a unit-norm embedding. Used by dedup and
// as the image side of a zero-shot classifier.
class ImageEmbedder {
 public:
  virtual ~ImageEmbedder() = default;

  virtual int embed_dim() const = 0;
  virtual ImageShape input_shape() const = 0;
  virtual Vec EmbedImage(const Image& image) const = 0;
  virtual std::string snapshot_id() const = 0;
};

class TextImageEncoder : public ImageEmbedder {
 public:
  virtual Vec EmbedText(std::string_view text) const = 0;
  // Multiplier applied to cosine similarities (exp of the learned log scale).
  virtual double logit_scale() const = 0;

  // Gradient of dot(cotangent, EmbedImage(image)) with respect to the image.
  virtual bool has_image_vjp() const { return false; }
  virtual Vec EmbedImageVjp(const Image& image, const Vec& cotangent) const;
};

// Checks shape and returns an embedding whose norm is verified to be 1.
Vec CheckedEmbedImage(const ImageEmbedder& embedder, const Image& image);

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_ENCODER_H_
