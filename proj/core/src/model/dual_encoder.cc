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

#include "zsrobust/model/dual_encoder.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zsrobust/common/error.h"
#include "zsrobust/model/classifier.h"
#include "zsrobust/model/snapshot.h"

namespace zsrobust {
namespace {

std::vector<int> DiagonalLabels(std::size_t n) {
  std::vector<int> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  return labels;
}

double RowCrossEntropyMean(const Mat& logits) {
  double total = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    total += CrossEntropy(logits.row(i).transpose(), static_cast<int>(i));
  }
  return total / static_cast<double>(logits.rows());
}

}  // namespace

ContrastiveLoss ComputeContrastiveLoss(const Mat& image_embeddings, const Mat& text_embeddings,
                                       double logit_scale) {
  if (image_embeddings.rows() != text_embeddings.rows() ||
      image_embeddings.cols() != text_embeddings.cols()) {
    throw ShapeMismatchError("contrastive loss needs row-aligned embeddings");
  }
  if (image_embeddings.rows() < 2) {
    throw InvalidArgumentError("contrastive loss needs a batch of at least 2 pairs");
  }
  const Mat sim = logit_scale * image_embeddings * text_embeddings.transpose();
  ContrastiveLoss loss;
  loss.image_to_text = RowCrossEntropyMean(sim);
  loss.text_to_image = RowCrossEntropyMean(sim.transpose());
  loss.total = 0.5 * (loss.image_to_text + loss.text_to_image);
  return loss;
}

DualEncoder::DualEncoder(ArchSpec arch, ImageShape shape, int embed_dim, Tokenizer tokenizer,
                         ParameterSet params)
    : arch_(arch),
      shape_(shape),
      embed_dim_(embed_dim),
      tokenizer_(std::move(tokenizer)),
      params_(std::move(params)) {
  if (embed_dim_ <= 0) throw InvalidArgumentError("embed_dim must be positive");
  if (params_.Get("text.embedding").rows() != tokenizer_.size()) {
    throw ShapeMismatchError("token table does not match vocabulary size");
  }
  snapshot_id_ = SnapshotId(DualEncoderToSnapshot(*this));
}

ParameterSet DualEncoder::InitParameters(const ArchSpec& arch, const ImageShape& shape,
                                         int embed_dim, int vocab_size, double logit_scale,
                                         Rng& rng) {
  if (!(logit_scale > 0)) throw InvalidArgumentError("logit scale must be positive");
  ParameterSet p = InitTrunk(arch, shape, embed_dim, "image.", rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat table(vocab_size, embed_dim);
  for (Eigen::Index i = 0; i < table.size(); ++i) table.data()[i] = normal(rng);
  p.Add("text.embedding", table);
  Mat proj(embed_dim, embed_dim);
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    proj.data()[i] = normal(rng) / std::sqrt(static_cast<double>(embed_dim));
  }
  p.Add("text.proj.weight", proj);
  p.Add("text.proj.bias", Mat::Zero(1, embed_dim));
  Mat log_scale(1, 1);
  log_scale(0, 0) = std::clamp(std::log(logit_scale), kMinLogScale, kMaxLogScale);
  p.Add("logit_scale.log", log_scale);
  return p;
}

Tape::Var DualEncoder::ImageTower(Tape& tape, ParameterBinder& binder, Tape::Var images) const {
  return tape.RowL2Normalize(TrunkForward(tape, binder, "image.", arch_, shape_, images));
}

Tape::Var DualEncoder::TextHead(Tape& tape, ParameterBinder& binder, Tape::Var pooled) const {
  return tape.RowL2Normalize(
      tape.AddRow(tape.MatMul(pooled, binder.Bind("text.proj.weight")),
                  binder.Bind("text.proj.bias")));
}

Tape::Var DualEncoder::Scale(Tape& tape, ParameterBinder& binder) const {
  return tape.ExpClamped(binder.Bind("logit_scale.log"), kMinLogScale, kMaxLogScale);
}

double DualEncoder::logit_scale() const {
  return std::exp(std::clamp(params_.Get("logit_scale.log")(0, 0), kMinLogScale, kMaxLogScale));
}

Mat DualEncoder::EmbedImages(const std::vector<const Image*>& images) const {
  for (const Image* image : images) {
    if (image->shape() != shape_) {
      throw ShapeMismatchError("image " + image->shape().ToString() +
                               " does not match encoder input " + shape_.ToString());
    }
  }
  Tape tape;
  ParameterBinder binder(tape, params_, false);
  return tape.value(ImageTower(tape, binder, tape.Constant(ImagesToRows(images))));
}

Vec DualEncoder::EmbedImage(const Image& image) const {
  return EmbedImages({&image}).row(0).transpose();
}

Vec DualEncoder::EmbedImageVjp(const Image& image, const Vec& cotangent) const {
  if (cotangent.size() != embed_dim_) throw ShapeMismatchError("cotangent size mismatch");
  Tape tape;
  ParameterBinder binder(tape, params_, false);
  Tape::Var x = tape.Leaf(ImageToRow(image));
  tape.Backward(tape.WeightedSum(ImageTower(tape, binder, x), cotangent.transpose()));
  return tape.grad(x).row(0).transpose();
}

Vec DualEncoder::EmbedTokens(const std::vector<int>& ids) const {
  Tape tape;
  ParameterBinder binder(tape, params_, false);
  Tape::Var pooled = tape.EmbeddingBagMean(binder.Bind("text.embedding"), {ids});
  return tape.value(TextHead(tape, binder, pooled)).row(0).transpose();
}

Vec DualEncoder::EmbedText(std::string_view text) const {
  return EmbedTokens(tokenizer_.Encode(text));
}

double DualEncoder::BatchLoss(const std::vector<const Image*>& images,
                              const std::vector<std::vector<int>>& token_bags,
                              ParameterSet* grads) const {
  return BatchLossWith(params_, images, token_bags, grads);
}

double DualEncoder::BatchLossWith(const ParameterSet& params,
                                  const std::vector<const Image*>& images,
                                  const std::vector<std::vector<int>>& token_bags,
                                  ParameterSet* grads) const {
  if (images.size() != token_bags.size()) {
    throw ShapeMismatchError("batch has " + std::to_string(images.size()) + " images and " +
                             std::to_string(token_bags.size()) + " captions");
  }
  if (images.size() < 2) {
    throw InvalidArgumentError("contrastive loss needs a batch of at least 2 pairs");
  }
  Tape tape;
  ParameterBinder binder(tape, params, grads != nullptr);
  Tape::Var img = ImageTower(tape, binder, tape.Constant(ImagesToRows(images)));
  Tape::Var txt =
      TextHead(tape, binder, tape.EmbeddingBagMean(binder.Bind("text.embedding"), token_bags));
  Tape::Var scale = Scale(tape, binder);
  Tape::Var i2t = tape.ScaleBy(tape.MatMulTransposed(img, txt), scale);
  Tape::Var t2i = tape.ScaleBy(tape.MatMulTransposed(txt, img), scale);
  Tape::Var loss =
      tape.Scale(tape.Add(tape.SoftmaxCrossEntropy(i2t, DiagonalLabels(images.size())),
                          tape.SoftmaxCrossEntropy(t2i, DiagonalLabels(images.size()))),
                 0.5);
  if (grads != nullptr) {
    tape.Backward(loss);
    *grads = binder.Gradients();
  }
  return tape.value(loss)(0, 0);
}

std::shared_ptr<DualEncoder> DualEncoder::WithParameters(ParameterSet params) const {
  return std::make_shared<DualEncoder>(arch_, shape_, embed_dim_, tokenizer_, std::move(params));
}

std::shared_ptr<DualEncoder> TrainDualEncoder(const std::vector<CaptionedImage>& pairs,
                                              const ArchSpec& arch, const TrainConfig& config,
                                              const std::vector<std::string>& extra_vocabulary) {
  config.Validate();
  if (config.batch_size < 2) {
    throw InvalidArgumentError("dual encoder batch size must be at least 2");
  }
  if (pairs.size() < 2) throw InvalidArgumentError("dual encoder needs at least 2 pairs");
  const ImageShape shape = pairs.front().image.shape();
  std::vector<std::string> corpus = extra_vocabulary;
  for (const auto& p : pairs) {
    if (p.image.shape() != shape) throw ShapeMismatchError("training images differ in shape");
    p.image.Validate();
    corpus.push_back(p.caption);
  }
  Tokenizer tokenizer = Tokenizer::Build(corpus);
  std::vector<std::vector<int>> bags;
  bags.reserve(pairs.size());
  for (const auto& p : pairs) bags.push_back(tokenizer.Encode(p.caption));

  Rng init_rng = MakeRng(config.seed, "dual-encoder-init");
  ParameterSet params = DualEncoder::InitParameters(arch, shape, config.embed_dim, tokenizer.size(),
                                                    config.temperature_init, init_rng);
  auto encoder = std::make_shared<DualEncoder>(arch, shape, config.embed_dim, tokenizer, params);
  AdamOptimizer optimizer(config.learning_rate);

  std::vector<std::size_t> order(pairs.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = MakeRng(config.seed, "dual-encoder-shuffle", static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start + 1 < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      if (end - start < 2) break;
      std::vector<const Image*> images;
      std::vector<std::vector<int>> batch_bags;
      for (std::size_t k = start; k < end; ++k) {
        images.push_back(&pairs[order[k]].image);
        batch_bags.push_back(bags[order[k]]);
      }
      ParameterSet grads;
      const double value = encoder->BatchLossWith(params, images, batch_bags, &grads);
      if (!std::isfinite(value)) {
        throw NumericError("non-finite contrastive loss at epoch " + std::to_string(epoch) +
                           ", batch starting at " + std::to_string(start));
      }
      optimizer.Step(params, grads);
      double& log_scale = params.Get("logit_scale.log")(0, 0);
      log_scale = std::clamp(log_scale, kMinLogScale, kMaxLogScale);
    }
  }
  params.RoundToFloat();
  return std::make_shared<DualEncoder>(arch, shape, config.embed_dim, std::move(tokenizer),
                                       std::move(params));
}

double InBatchRetrievalAccuracy(const DualEncoder& encoder,
                                const std::vector<CaptionedImage>& pairs, int batch_size) {
  if (batch_size < 1) throw InvalidArgumentError("batch_size must be positive");
  if (pairs.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < pairs.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(pairs.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<const Image*> images;
    Mat text(static_cast<Eigen::Index>(end - start), encoder.embed_dim());
    for (std::size_t k = start; k < end; ++k) {
      images.push_back(&pairs[k].image);
      text.row(static_cast<Eigen::Index>(k - start)) =
          encoder.EmbedText(pairs[k].caption).transpose();
    }
    const Mat sim = encoder.EmbedImages(images) * text.transpose();
    for (Eigen::Index i = 0; i < sim.rows(); ++i) {
      const int best = Argmax(sim.row(i).transpose());
      if (pairs[start + static_cast<std::size_t>(best)].caption ==
          pairs[start + static_cast<std::size_t>(i)].caption) {
        ++correct;
      }
    }
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace zsrobust
