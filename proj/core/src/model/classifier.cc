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

#include "zsrobust/model/classifier.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zsrobust/common/error.h"

namespace zsrobust {

Vec ClassifierModel::LogitVjp(const Image&, const Vec&) const {
  throw UnsupportedCapabilityError("model does not expose logit vector-Jacobian products");
}

Vec ClassifierModel::LossGradient(const Image& image, int label,
                                  LossDirection direction) const {
  if (!has_logit_vjp()) {
    throw UnsupportedCapabilityError("model does not expose input gradients");
  }
  const Vec logits = Logits(image);
  Vec cotangent = Softmax(logits);
  cotangent(label) -= 1.0;
  Vec g = LogitVjp(image, cotangent);
  if (direction == LossDirection::kMinimize) g = -g;
  return g;
}

Vec ForwardLogits(const ClassifierModel& model, const Image& image) {
  const ImageShape expected = model.input_shape();
  if (image.shape() != expected) {
    throw ShapeMismatchError("model expects input " + expected.ToString() + ", got " +
                             image.shape().ToString());
  }
  Vec logits = model.Logits(image);
  if (logits.size() != model.num_classes()) {
    throw ShapeMismatchError("model returned " + std::to_string(logits.size()) +
                             " logits for " + std::to_string(model.num_classes()) +
                             " classes");
  }
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits(i))) throw NumericError("non-finite logit");
  }
  return logits;
}

Vec InputGradient(const ClassifierModel& model, const Image& image, int label,
                  LossDirection direction) {
  if (!model.has_input_gradient()) {
    throw UnsupportedCapabilityError("model does not expose input gradients");
  }
  if (label < 0 || label >= model.num_classes()) {
    throw InvalidArgumentError("label " + std::to_string(label) + " outside [0," +
                               std::to_string(model.num_classes()) + ")");
  }
  if (image.shape() != model.input_shape()) {
    throw ShapeMismatchError("model expects input " + model.input_shape().ToString() +
                             ", got " + image.shape().ToString());
  }
  Vec g = model.LossGradient(image, label, direction);
  if (static_cast<std::size_t>(g.size()) != image.size()) {
    throw ShapeMismatchError("gradient length does not match the image");
  }
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g(i))) throw NumericError("non-finite input gradient");
  }
  return g;
}

int Argmax(const Vec& logits) {
  int best = 0;
  for (Eigen::Index i = 1; i < logits.size(); ++i) {
    if (logits(i) > logits(best)) best = static_cast<int>(i);
  }
  return best;
}

int Predict(const ClassifierModel& model, const Image& image) {
  return Argmax(ForwardLogits(model, image));
}

Vec Softmax(const Vec& logits) {
  const double m = logits.maxCoeff();
  Vec p = (logits.array() - m).exp().matrix();
  return p / p.sum();
}

double CrossEntropy(const Vec& logits, int label) {
  const double m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum()) - logits(label);
}

std::vector<int> RankClasses(const Vec& logits) {
  std::vector<int> order(static_cast<std::size_t>(logits.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return logits(a) > logits(b); });
  return order;
}

}  // namespace zsrobust
