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

#ifndef ZSROBUST_MODEL_ZERO_SHOT_H_
#define ZSROBUST_MODEL_ZERO_SHOT_H_

#include <memory>
#include <string>
#include <vector>

#include "zsrobust/model/classifier.h"
#include "zsrobust/model/encoder.h"

namespace zsrobust {

// logits[c] = scale * dot(class_embeddings.row(c), EmbedImage(image)). Input
// gradients are available when the encoder exposes image VJPs.
class ZeroShotClassifier final : public ClassifierModel {
 public:
  ZeroShotClassifier(std::shared_ptr<const TextImageEncoder> encoder,
                     std::vector<std::string> class_names, Mat class_embeddings);

  int num_classes() const override { return static_cast<int>(class_names_.size()); }
  ImageShape input_shape() const override { return encoder_->input_shape(); }
  std::vector<std::string> class_names() const override { return class_names_; }
  Vec Logits(const Image& image) const override;
  bool has_input_gradient() const override { return encoder_->has_image_vjp(); }
  bool has_logit_vjp() const override { return encoder_->has_image_vjp(); }
  Vec LogitVjp(const Image& image, const Vec& cotangent) const override;
  std::string snapshot_id() const override { return snapshot_id_; }

  const Mat& class_embeddings() const { return class_embeddings_; }
  const TextImageEncoder& encoder() const { return *encoder_; }

 private:
  std::shared_ptr<const TextImageEncoder> encoder_;
  std::vector<std::string> class_names_;
  Mat class_embeddings_;
  double scale_;
  std::string snapshot_id_;
};

// Replaces every "{}" in each template with the class name; a template
// without a placeholder is used verbatim.
std::vector<std::vector<std::string>> ExpandPromptTemplates(
    const std::vector<std::string>& templates, const std::vector<std::string>& class_names);

// Mean of the rows, renormalized to unit length.
Vec EnsembleEmbeddings(const Mat& prompt_embeddings);

// Embeds every prompt of every class, ensembles per class in embedding
// space and builds the cosine classifier.
std::shared_ptr<ZeroShotClassifier> SynthesizeZeroShotClassifier(
    std::shared_ptr<const TextImageEncoder> encoder, const std::vector<std::string>& class_names,
    const std::vector<std::vector<std::string>>& class_prompts);

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_ZERO_SHOT_H_
