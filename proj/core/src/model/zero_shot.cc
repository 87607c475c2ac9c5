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

#include "zsrobust/model/zero_shot.h"

#include <cmath>

#include "zsrobust/common/error.h"
#include "zsrobust/common/hash.h"

namespace zsrobust {

ZeroShotClassifier::ZeroShotClassifier(std::shared_ptr<const TextImageEncoder> encoder,
                                       std::vector<std::string> class_names, Mat class_embeddings)
    : encoder_(std::move(encoder)),
      class_names_(std::move(class_names)),
      class_embeddings_(std::move(class_embeddings)) {
  if (!encoder_) throw InvalidArgumentError("zero-shot classifier needs an encoder");
  if (class_names_.empty()) throw InvalidArgumentError("zero-shot classifier needs classes");
  if (class_embeddings_.rows() != static_cast<Eigen::Index>(class_names_.size()) ||
      class_embeddings_.cols() != encoder_->embed_dim()) {
    throw ShapeMismatchError("class embeddings must be " + std::to_string(class_names_.size()) +
                             " x " + std::to_string(encoder_->embed_dim()));
  }
  scale_ = encoder_->logit_scale();
  Sha256 h;
  h.Update("zero-shot").Update(encoder_->snapshot_id());
  for (const auto& name : class_names_) h.UpdateU64(name.size()).Update(name);
  for (Eigen::Index i = 0; i < class_embeddings_.size(); ++i) {
    h.UpdateF32(class_embeddings_.data()[i]);
  }
  snapshot_id_ = h.HexDigest();
}

Vec ZeroShotClassifier::Logits(const Image& image) const {
  return scale_ * (class_embeddings_ * encoder_->EmbedImage(image));
}

Vec ZeroShotClassifier::LogitVjp(const Image& image, const Vec& cotangent) const {
  if (cotangent.size() != num_classes()) throw ShapeMismatchError("cotangent size mismatch");
  const Vec embedding_cotangent = scale_ * (class_embeddings_.transpose() * cotangent);
  return encoder_->EmbedImageVjp(image, embedding_cotangent);
}

std::vector<std::vector<std::string>> ExpandPromptTemplates(
    const std::vector<std::string>& templates, const std::vector<std::string>& class_names) {
  std::vector<std::vector<std::string>> out;
  for (const auto& name : class_names) {
    std::vector<std::string> prompts;
    for (const auto& t : templates) {
      std::string p;
      std::size_t pos = 0;
      while (true) {
        const std::size_t hit = t.find("{}", pos);
        if (hit == std::string::npos) {
          p += t.substr(pos);
          break;
        }
        p += t.substr(pos, hit - pos);
        p += name;
        pos = hit + 2;
      }
      prompts.push_back(std::move(p));
    }
    out.push_back(std::move(prompts));
  }
  return out;
}

Vec EnsembleEmbeddings(const Mat& prompt_embeddings) {
  if (prompt_embeddings.rows() == 0) throw InvalidArgumentError("no prompt embeddings");
  Vec mean = prompt_embeddings.colwise().mean().transpose();
  const double norm = mean.norm();
  if (!(norm > 0) || !std::isfinite(norm)) {
    throw NumericError("prompt ensemble has zero or non-finite mean");
  }
  return mean / norm;
}

std::shared_ptr<ZeroShotClassifier> SynthesizeZeroShotClassifier(
    std::shared_ptr<const TextImageEncoder> encoder, const std::vector<std::string>& class_names,
    const std::vector<std::vector<std::string>>& class_prompts) {
  if (!encoder) throw InvalidArgumentError("zero-shot synthesis needs an encoder");
  if (class_prompts.size() != class_names.size()) {
    throw ShapeMismatchError("got prompts for " + std::to_string(class_prompts.size()) +
                             " classes, expected " + std::to_string(class_names.size()));
  }
  Mat class_embeddings(static_cast<Eigen::Index>(class_names.size()), encoder->embed_dim());
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    const auto& prompts = class_prompts[c];
    if (prompts.empty()) {
      throw InvalidArgumentError("class '" + class_names[c] + "' has no prompts");
    }
    Mat rows(static_cast<Eigen::Index>(prompts.size()), encoder->embed_dim());
    for (std::size_t k = 0; k < prompts.size(); ++k) {
      rows.row(static_cast<Eigen::Index>(k)) = encoder->EmbedText(prompts[k]).transpose();
    }
    class_embeddings.row(static_cast<Eigen::Index>(c)) = EnsembleEmbeddings(rows).transpose();
  }
  return std::make_shared<ZeroShotClassifier>(std::move(encoder), class_names,
                                              std::move(class_embeddings));
}

}  // namespace zsrobust
