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

#ifndef ZSROBUST_PROMPTSEARCH_OBJECTIVE_H_
#define ZSROBUST_PROMPTSEARCH_OBJECTIVE_H_

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "zsrobust/common/dataset.h"
#include "zsrobust/common/tensor.h"
#include "zsrobust/model/dual_encoder.h"
#include "zsrobust/model/zero_shot.h"

namespace zsrobust {

enum class SlotKind { kTrigger, kClass, kLiteral };

struct PromptSlot {
  SlotKind kind = SlotKind::kTrigger;
  std::string literal;  // kLiteral only, one word
};

// Slot sequence such as "[T][T][T][T][C]" or "[T][T] photo of a [C]".
class PromptTemplate {
 public:
  static PromptTemplate Parse(std::string_view text);

  const std::string& text() const { return text_; }
  const std::vector<PromptSlot>& slots() const { return slots_; }
  int num_triggers() const { return num_triggers_; }
  // Ordinal among trigger slots of template position `position`; throws if
  // that position is not a trigger slot.
  int TriggerOrdinal(std::size_t position) const;
  // Template position of trigger slot `ordinal`.
  std::size_t TriggerPosition(int ordinal) const;

 private:
  std::string text_;
  std::vector<PromptSlot> slots_;
  int num_triggers_ = 0;
};

// Loss of a prompt as a function of its trigger tokens, over a fixed pool of
// training examples addressed by index.
class PromptObjective {
 public:
  virtual ~PromptObjective() = default;

  virtual const PromptTemplate& prompt_template() const = 0;
  // V x D table of token embeddings.
  virtual const Mat& token_embeddings() const = 0;
  virtual std::size_t example_count() const = 0;
  // Mean loss over `batch`. With `grad` non-null, also the gradient with
  // respect to the trigger embeddings, one row per trigger slot.
  virtual double Loss(const std::vector<int>& triggers, const std::vector<std::size_t>& batch,
                      Mat* grad = nullptr) const = 0;

  int vocab_size() const { return static_cast<int>(token_embeddings().rows()); }
  void CheckTriggers(const std::vector<int>& triggers) const;
};

// Loss that is affine in every trigger embedding:
//   L = mean_b (offset_b + sum_s <weights_b[s], e_{trigger_s}>).
// A first-order expansion of it is exact, which makes it the fixture for
// checking candidate scoring.
class LinearPromptObjective final : public PromptObjective {
 public:
  LinearPromptObjective(PromptTemplate prompt_template, Mat token_embeddings,
                        std::vector<Mat> example_weights, std::vector<double> example_offsets);

  const PromptTemplate& prompt_template() const override { return template_; }
  const Mat& token_embeddings() const override { return tokens_; }
  std::size_t example_count() const override { return weights_.size(); }
  double Loss(const std::vector<int>& triggers, const std::vector<std::size_t>& batch,
              Mat* grad = nullptr) const override;

 private:
  PromptTemplate template_;
  Mat tokens_;
  std::vector<Mat> weights_;
  std::vector<double> offsets_;
};

// Mean zero-shot cross-entropy of a dual encoder on labelled images, where
// the class slot is filled with each class name in turn. Mean pooling makes
// the pooled class bags affine in the trigger embeddings:
//   pooled = A * T + K
// with A[c][s] = 1 / len(prompt_c) and K holding the fixed tokens.
class ZeroShotPromptObjective final : public PromptObjective {
 public:
  ZeroShotPromptObjective(std::shared_ptr<const DualEncoder> encoder, PromptTemplate prompt_template,
                          const Dataset& train, int workers = 1);
  // Without training examples: prompts can be built and rendered but not
  // scored.
  ZeroShotPromptObjective(std::shared_ptr<const DualEncoder> encoder, PromptTemplate prompt_template,
                          std::vector<std::string> class_names, int workers = 1);

  const PromptTemplate& prompt_template() const override { return template_; }
  const Mat& token_embeddings() const override { return encoder_->token_table(); }
  std::size_t example_count() const override { return labels_.size(); }
  double Loss(const std::vector<int>& triggers, const std::vector<std::size_t>& batch,
              Mat* grad = nullptr) const override;

  const std::vector<std::string>& class_names() const { return class_names_; }
  const DualEncoder& encoder() const { return *encoder_; }
  std::shared_ptr<const DualEncoder> shared_encoder() const { return encoder_; }

  // Token ids of the full prompt for class `c`, in template order.
  std::vector<int> PromptTokens(const std::vector<int>& triggers, int c) const;
  // Template with trigger and literal words filled in and "{}" for the class.
  std::string Render(const std::vector<int>& triggers) const;
  // C x d normalized text embeddings of the prompts.
  Mat ClassEmbeddings(const std::vector<int>& triggers) const;

  // Unit image embeddings (rows) of `dataset`, for repeated scoring.
  Mat EmbedDataset(const Dataset& dataset) const;
  double Accuracy(const std::vector<int>& triggers, const Mat& image_embeddings,
                  const std::vector<int>& labels) const;

  std::shared_ptr<ZeroShotClassifier> Classifier(
      const std::vector<std::vector<int>>& trigger_sets) const;

 private:
  std::shared_ptr<const DualEncoder> encoder_;
  PromptTemplate template_;
  std::vector<std::string> class_names_;
  std::vector<std::vector<int>> class_tokens_;
  std::vector<int> literal_tokens_;  // per template position, -1 if not literal
  Mat image_embeddings_;             // N x d
  std::vector<int> labels_;
  Mat mix_;                          // C x S
  Mat fixed_;                        // C x D
  int workers_;
};

}  // namespace zsrobust

#endif  // ZSROBUST_PROMPTSEARCH_OBJECTIVE_H_
