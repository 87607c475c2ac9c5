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

#include "zsrobust/promptsearch/objective.h"

#include <algorithm>
#include <cmath>

#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"
#include "zsrobust/metrics/accuracy.h"
#include "zsrobust/model/classifier.h"
#include "zsrobust/model/parameters.h"
#include "zsrobust/model/tape.h"

namespace zsrobust {
namespace {

constexpr std::size_t kEmbedChunk = 256;

}  // namespace

PromptTemplate PromptTemplate::Parse(std::string_view text) {
  PromptTemplate t;
  t.text_ = std::string(text);
  int classes = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find('[', pos);
    const std::string_view literal = text.substr(pos, open == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : open - pos);
    for (auto& word : Tokenizer::Split(literal)) {
      t.slots_.push_back({SlotKind::kLiteral, std::move(word)});
    }
    if (open == std::string_view::npos) break;
    const std::string_view marker = text.substr(open, 3);
    if (marker == "[T]") {
      t.slots_.push_back({SlotKind::kTrigger, {}});
      ++t.num_triggers_;
    } else if (marker == "[C]") {
      t.slots_.push_back({SlotKind::kClass, {}});
      ++classes;
    } else {
      throw ConfigError("unknown prompt template marker near '" + std::string(text.substr(open)) +
                        "'");
    }
    pos = open + 3;
  }
  if (classes != 1) throw ConfigError("prompt template needs exactly one [C] slot");
  if (t.num_triggers_ < 1) throw ConfigError("prompt template needs at least one [T] slot");
  return t;
}

int PromptTemplate::TriggerOrdinal(std::size_t position) const {
  if (position >= slots_.size() || slots_[position].kind != SlotKind::kTrigger) {
    throw InvalidArgumentError("template position " + std::to_string(position) +
                               " is not a trigger slot");
  }
  int ordinal = 0;
  for (std::size_t i = 0; i < position; ++i) ordinal += slots_[i].kind == SlotKind::kTrigger;
  return ordinal;
}

std::size_t PromptTemplate::TriggerPosition(int ordinal) const {
  int seen = 0;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].kind != SlotKind::kTrigger) continue;
    if (seen++ == ordinal) return i;
  }
  throw InvalidArgumentError("trigger ordinal " + std::to_string(ordinal) + " out of range");
}

void PromptObjective::CheckTriggers(const std::vector<int>& triggers) const {
  if (static_cast<int>(triggers.size()) != prompt_template().num_triggers()) {
    throw InvalidArgumentError("expected " + std::to_string(prompt_template().num_triggers()) +
                               " trigger tokens, got " + std::to_string(triggers.size()));
  }
  for (int id : triggers) {
    if (id < 0 || id >= vocab_size()) {
      throw InvalidArgumentError("trigger token " + std::to_string(id) + " outside vocabulary");
    }
  }
}

LinearPromptObjective::LinearPromptObjective(PromptTemplate prompt_template, Mat token_embeddings,
                                             std::vector<Mat> example_weights,
                                             std::vector<double> example_offsets)
    : template_(std::move(prompt_template)),
      tokens_(std::move(token_embeddings)),
      weights_(std::move(example_weights)),
      offsets_(std::move(example_offsets)) {
  if (tokens_.rows() == 0) throw InvalidArgumentError("empty token table");
  if (weights_.empty() || weights_.size() != offsets_.size()) {
    throw InvalidArgumentError("linear objective needs one weight matrix and offset per example");
  }
  for (const auto& w : weights_) {
    if (w.rows() != template_.num_triggers() || w.cols() != tokens_.cols()) {
      throw ShapeMismatchError("linear objective weights must be (#triggers x embedding dim)");
    }
  }
}

double LinearPromptObjective::Loss(const std::vector<int>& triggers,
                                   const std::vector<std::size_t>& batch, Mat* grad) const {
  CheckTriggers(triggers);
  if (batch.empty()) throw InvalidArgumentError("empty scoring batch");
  const auto s = static_cast<Eigen::Index>(triggers.size());
  Mat mean_w = Mat::Zero(s, tokens_.cols());
  double offset = 0;
  for (std::size_t b : batch) {
    if (b >= weights_.size()) throw InvalidArgumentError("batch index out of range");
    mean_w += weights_[b];
    offset += offsets_[b];
  }
  mean_w /= static_cast<double>(batch.size());
  offset /= static_cast<double>(batch.size());
  double loss = offset;
  for (Eigen::Index i = 0; i < s; ++i) {
    loss += mean_w.row(i).dot(tokens_.row(triggers[static_cast<std::size_t>(i)]));
  }
  if (grad != nullptr) *grad = mean_w;
  return loss;
}

ZeroShotPromptObjective::ZeroShotPromptObjective(std::shared_ptr<const DualEncoder> encoder,
                                                 PromptTemplate prompt_template,
                                                 const Dataset& train, int workers)
    : ZeroShotPromptObjective(std::move(encoder), std::move(prompt_template), train.class_names(),
                              workers) {
  if (train.empty()) throw InvalidArgumentError("prompt search needs training examples");
  image_embeddings_ = EmbedDataset(train);
  labels_ = Labels(train);
}

ZeroShotPromptObjective::ZeroShotPromptObjective(std::shared_ptr<const DualEncoder> encoder,
                                                 PromptTemplate prompt_template,
                                                 std::vector<std::string> class_names, int workers)
    : encoder_(std::move(encoder)),
      template_(std::move(prompt_template)),
      class_names_(std::move(class_names)),
      workers_(workers) {
  if (!encoder_) throw InvalidArgumentError("null encoder");
  if (class_names_.empty()) throw InvalidArgumentError("prompt objective needs class names");
  const Tokenizer& tok = encoder_->tokenizer();
  for (const auto& name : class_names_) class_tokens_.push_back(tok.Encode(name));
  for (const auto& slot : template_.slots()) {
    literal_tokens_.push_back(slot.kind == SlotKind::kLiteral ? tok.Lookup(slot.literal) : -1);
  }

  const Mat& table = encoder_->token_table();
  const auto c = static_cast<Eigen::Index>(class_names_.size());
  mix_ = Mat::Zero(c, template_.num_triggers());
  fixed_ = Mat::Zero(c, table.cols());
  for (Eigen::Index k = 0; k < c; ++k) {
    const auto& name_ids = class_tokens_[static_cast<std::size_t>(k)];
    double length = 0;
    for (std::size_t p = 0; p < template_.slots().size(); ++p) {
      switch (template_.slots()[p].kind) {
        case SlotKind::kTrigger:
          length += 1;
          break;
        case SlotKind::kLiteral:
          length += 1;
          fixed_.row(k) += table.row(literal_tokens_[p]);
          break;
        case SlotKind::kClass:
          length += static_cast<double>(name_ids.size());
          for (int id : name_ids) fixed_.row(k) += table.row(id);
          break;
      }
    }
    mix_.row(k).setConstant(1.0 / length);
    fixed_.row(k) /= length;
  }
}

double ZeroShotPromptObjective::Loss(const std::vector<int>& triggers,
                                     const std::vector<std::size_t>& batch, Mat* grad) const {
  CheckTriggers(triggers);
  if (batch.empty()) throw InvalidArgumentError("empty scoring batch");
  const Mat& table = encoder_->token_table();
  Mat trig(static_cast<Eigen::Index>(triggers.size()), table.cols());
  for (std::size_t s = 0; s < triggers.size(); ++s) {
    trig.row(static_cast<Eigen::Index>(s)) = table.row(triggers[s]);
  }
  Mat images(static_cast<Eigen::Index>(batch.size()), image_embeddings_.cols());
  std::vector<int> labels(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b] >= labels_.size()) throw InvalidArgumentError("batch index out of range");
    images.row(static_cast<Eigen::Index>(b)) = image_embeddings_.row(static_cast<Eigen::Index>(batch[b]));
    labels[b] = labels_[batch[b]];
  }

  Tape tape;
  ParameterBinder binder(tape, encoder_->params(), false);
  const Tape::Var t = grad != nullptr ? tape.Leaf(std::move(trig)) : tape.Constant(std::move(trig));
  const Tape::Var pooled = tape.Add(tape.MatMul(tape.ConstantRef(mix_), t), tape.ConstantRef(fixed_));
  const Tape::Var classes = encoder_->TextHead(tape, binder, pooled);
  const Tape::Var logits =
      tape.Scale(tape.MatMulTransposed(tape.Constant(std::move(images)), classes),
                 encoder_->logit_scale());
  const Tape::Var loss = tape.SoftmaxCrossEntropy(logits, std::move(labels));
  const double value = tape.value(loss)(0, 0);
  if (!std::isfinite(value)) throw NumericError("prompt loss is not finite");
  if (grad != nullptr) {
    tape.Backward(loss);
    *grad = tape.grad(t);
  }
  return value;
}

std::vector<int> ZeroShotPromptObjective::PromptTokens(const std::vector<int>& triggers,
                                                       int c) const {
  CheckTriggers(triggers);
  std::vector<int> ids;
  std::size_t next = 0;
  for (std::size_t p = 0; p < template_.slots().size(); ++p) {
    switch (template_.slots()[p].kind) {
      case SlotKind::kTrigger:
        ids.push_back(triggers[next++]);
        break;
      case SlotKind::kLiteral:
        ids.push_back(literal_tokens_[p]);
        break;
      case SlotKind::kClass: {
        const auto& name_ids = class_tokens_.at(static_cast<std::size_t>(c));
        ids.insert(ids.end(), name_ids.begin(), name_ids.end());
        break;
      }
    }
  }
  return ids;
}

std::string ZeroShotPromptObjective::Render(const std::vector<int>& triggers) const {
  CheckTriggers(triggers);
  const Tokenizer& tok = encoder_->tokenizer();
  std::string out;
  std::size_t next = 0;
  for (const auto& slot : template_.slots()) {
    if (!out.empty()) out += ' ';
    switch (slot.kind) {
      case SlotKind::kTrigger:
        out += tok.token(triggers[next++]);
        break;
      case SlotKind::kLiteral:
        out += slot.literal;
        break;
      case SlotKind::kClass:
        out += "{}";
        break;
    }
  }
  return out;
}

Mat ZeroShotPromptObjective::ClassEmbeddings(const std::vector<int>& triggers) const {
  Mat out(static_cast<Eigen::Index>(class_names_.size()), encoder_->embed_dim());
  for (std::size_t c = 0; c < class_names_.size(); ++c) {
    out.row(static_cast<Eigen::Index>(c)) =
        encoder_->EmbedTokens(PromptTokens(triggers, static_cast<int>(c))).transpose();
  }
  return out;
}

Mat ZeroShotPromptObjective::EmbedDataset(const Dataset& dataset) const {
  Mat out(static_cast<Eigen::Index>(dataset.size()), encoder_->embed_dim());
  const std::size_t chunks = (dataset.size() + kEmbedChunk - 1) / kEmbedChunk;
  ParallelFor(chunks, workers_, [&](std::size_t k) {
    const std::size_t begin = k * kEmbedChunk;
    const std::size_t end = std::min(dataset.size(), begin + kEmbedChunk);
    std::vector<const Image*> images;
    for (std::size_t i = begin; i < end; ++i) images.push_back(&dataset[i].image);
    out.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin)) =
        encoder_->EmbedImages(images);
  });
  return out;
}

double ZeroShotPromptObjective::Accuracy(const std::vector<int>& triggers,
                                         const Mat& image_embeddings,
                                         const std::vector<int>& labels) const {
  if (image_embeddings.rows() != static_cast<Eigen::Index>(labels.size()) || labels.empty()) {
    throw ShapeMismatchError("validation embeddings and labels disagree");
  }
  const Mat scores = image_embeddings * ClassEmbeddings(triggers).transpose();
  std::vector<int> predictions(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    predictions[i] = Argmax(scores.row(static_cast<Eigen::Index>(i)).transpose());
  }
  return AccuracyFromPredictions(predictions, labels);
}

std::shared_ptr<ZeroShotClassifier> ZeroShotPromptObjective::Classifier(
    const std::vector<std::vector<int>>& trigger_sets) const {
  if (trigger_sets.empty()) throw InvalidArgumentError("no prompts to ensemble");
  const auto c = static_cast<Eigen::Index>(class_names_.size());
  std::vector<Mat> per_prompt;
  for (const auto& t : trigger_sets) per_prompt.push_back(ClassEmbeddings(t));
  Mat classes(c, encoder_->embed_dim());
  for (Eigen::Index k = 0; k < c; ++k) {
    Mat rows(static_cast<Eigen::Index>(per_prompt.size()), encoder_->embed_dim());
    for (std::size_t p = 0; p < per_prompt.size(); ++p) {
      rows.row(static_cast<Eigen::Index>(p)) = per_prompt[p].row(k);
    }
    classes.row(k) = EnsembleEmbeddings(rows).transpose();
  }
  return std::make_shared<ZeroShotClassifier>(encoder_, class_names_, std::move(classes));
}

}  // namespace zsrobust
