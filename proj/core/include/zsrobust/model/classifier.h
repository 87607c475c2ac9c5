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

#ifndef ZSROBUST_MODEL_CLASSIFIER_H_
#define ZSROBUST_MODEL_CLASSIFIER_H_

#include <string>
#include <vector>

#include "zsrobust/common/image.h"
#include "zsrobust/common/tensor.h"

namespace zsrobust {

// Untargeted attacks maximize the true-class loss; targeted attacks minimize
// the target-class loss.
enum class LossDirection { kMinimize, kMaximize };

// Scoring interface every attack and metric is written against. Models are
// immutable after construction; all methods must be safe to call from
// several threads at once.
class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;

  virtual int num_classes() const = 0;
  virtual ImageShape input_shape() const = 0;
  virtual std::vector<std::string> class_names() const { return {}; }

  // Raw logits; callers normally go through ForwardLogits() which checks the
  // input shape and output finiteness.
  virtual Vec Logits(const Image& image) const = 0;

  virtual bool has_input_gradient() const = 0;
  // Gradient of sum_k cotangent[k] * logits[k] with respect to the image.
  // Needed by DeepFool; models without it throw UnsupportedCapabilityError.
  virtual bool has_logit_vjp() const { return false; }
  virtual Vec LogitVjp(const Image& image, const Vec& cotangent) const;

  // Gradient of the cross-entropy loss for `label`; kMaximize returns the
  // ascent direction, kMinimize the descent direction.
  virtual Vec LossGradient(const Image& image, int label, LossDirection direction) const;

  // Stable identifier of the parameters (hash of the serialized snapshot).
  virtual std::string snapshot_id() const = 0;
};

// Checks the input shape against the model and the logits for finiteness.
Vec ForwardLogits(const ClassifierModel& model, const Image& image);

// Checks capability, label range and gradient finiteness.
Vec InputGradient(const ClassifierModel& model, const Image& image, int label,
                  LossDirection direction);

// Index of the largest logit; ties go to the lowest index.
int Argmax(const Vec& logits);
int Predict(const ClassifierModel& model, const Image& image);

Vec Softmax(const Vec& logits);
double CrossEntropy(const Vec& logits, int label);

// Class indices sorted by decreasing logit, ties by lowest index.
std::vector<int> RankClasses(const Vec& logits);

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_CLASSIFIER_H_
