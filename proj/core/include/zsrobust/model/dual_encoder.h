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

#ifndef ZSROBUST_MODEL_DUAL_ENCODER_H_
#define ZSROBUST_MODEL_DUAL_ENCODER_H_

#include <memory>
#include <string>
#include <vector>

#include "zsrobust/model/encoder.h"
#include "zsrobust/model/network.h"
#include "zsrobust/model/parameters.h"
#include "zsrobust/model/tokenizer.h"

namespace zsrobust {

// Bounds of the learned log logit scale.
inline constexpr double kMinLogScale = -2.0;
inline constexpr double kMaxLogScale = 5.0;

struct CaptionedImage {
  Image image;
  std::string caption;
};

struct ContrastiveLoss {
  double image_to_text = 0;
  double text_to_image = 0;
  double total = 0;  // mean of the two directions
};

// Symmetric in-batch contrastive loss for row-aligned embeddings.
ContrastiveLoss ComputeContrastiveLoss(const Mat& image_embeddings, const Mat& text_embeddings,
                                       double logit_scale);

// Image side: reference trunk to `embed_dim`, then l2 normalization.
// Text side: mean of token embeddings, affine map, l2 normalization.
class DualEncoder final : public TextImageEncoder {
 public:
  DualEncoder(ArchSpec arch, ImageShape shape, int embed_dim, Tokenizer tokenizer,
              ParameterSet params);

  static ParameterSet InitParameters(const ArchSpec& arch, const ImageShape& shape, int embed_dim,
                                     int vocab_size, double logit_scale, Rng& rng);

  int embed_dim() const override { return embed_dim_; }
  ImageShape input_shape() const override { return shape_; }
  Vec EmbedImage(const Image& image) const override;
  Vec EmbedText(std::string_view text) const override;
  double logit_scale() const override;
  bool has_image_vjp() const override { return true; }
  Vec EmbedImageVjp(const Image& image, const Vec& cotangent) const override;
  std::string snapshot_id() const override { return snapshot_id_; }

  Vec EmbedTokens(const std::vector<int>& ids) const;
  Mat EmbedImages(const std::vector<const Image*>& images) const;

  // Contrastive loss on a batch; fills `grads` with parameter gradients when
  // non-null.
  double BatchLoss(const std::vector<const Image*>& images,
                   const std::vector<std::vector<int>>& token_bags,
                   ParameterSet* grads = nullptr) const;
  // Same loss evaluated with `params` in place of this encoder's own.
  double BatchLossWith(const ParameterSet& params, const std::vector<const Image*>& images,
                       const std::vector<std::vector<int>>& token_bags,
                       ParameterSet* grads = nullptr) const;

  // Same architecture and tokenizer with different parameters.
  std::shared_ptr<DualEncoder> WithParameters(ParameterSet params) const;

  // Pieces of the text tower for callers that put their own token
  // embeddings on a tape (prompt search).
  const Mat& token_table() const { return params_.Get("text.embedding"); }
  // Projects pooled token embeddings (rows) to normalized text embeddings.
  Tape::Var TextHead(Tape& tape, ParameterBinder& binder, Tape::Var pooled) const;

  const ArchSpec& arch() const { return arch_; }
  const Tokenizer& tokenizer() const { return tokenizer_; }
  const ParameterSet& params() const { return params_; }

 private:
  Tape::Var ImageTower(Tape& tape, ParameterBinder& binder, Tape::Var images) const;
  Tape::Var Scale(Tape& tape, ParameterBinder& binder) const;

  ArchSpec arch_;
  ImageShape shape_;
  int embed_dim_;
  Tokenizer tokenizer_;
  ParameterSet params_;
  std::string snapshot_id_;
};

// Mini-batch Adam on the symmetric contrastive loss. The vocabulary is built
// from the captions plus `extra_vocabulary`. A trailing batch with a single
// pair is skipped since the loss needs at least two.
std::shared_ptr<DualEncoder> TrainDualEncoder(const std::vector<CaptionedImage>& pairs,
                                              const ArchSpec& arch, const TrainConfig& config,
                                              const std::vector<std::string>& extra_vocabulary = {});

// Fraction of images whose most similar caption within their batch has the
// same text as their own caption.
double InBatchRetrievalAccuracy(const DualEncoder& encoder,
                                const std::vector<CaptionedImage>& pairs, int batch_size);

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_DUAL_ENCODER_H_
