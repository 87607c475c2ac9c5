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

#ifndef ZSROBUST_COMMON_DATASET_H_
#define ZSROBUST_COMMON_DATASET_H_

#include <optional>
#include <string>
#include <vector>

#include "zsrobust/common/image.h"

namespace zsrobust {

struct LabeledExample {
  Image image;
  int label = 0;
  // Target class of a targeted (typographic) attack; never equals label.
  std::optional<int> target;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::vector<std::string> class_names,
          std::vector<LabeledExample> examples = {});

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  const std::vector<std::string>& class_names() const { return class_names_; }
  int num_classes() const { return static_cast<int>(class_names_.size()); }

  const std::vector<LabeledExample>& examples() const { return examples_; }
  std::vector<LabeledExample>& mutable_examples() { return examples_; }
  const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  void Add(LabeledExample example) { examples_.push_back(std::move(example)); }

  // Shape shared by every image; throws if the dataset is empty or mixed.
  ImageShape input_shape() const;

  // Checks labels, targets and image ranges.
  void Validate() const;

  // SHA-256 over class names, labels, targets and f32 pixel values. Stable
  // under save/load because generators emit 8-bit quantized pixels.
  std::string ContentHash() const;

  // "<name>@<first 16 hex digits of the content hash>"
  std::string Identity() const;

  // Examples at the given positions, in order.
  Dataset Subset(const std::vector<std::size_t>& indices, std::string name) const;

 private:
  std::string name_;
  std::vector<std::string> class_names_;
  std::vector<LabeledExample> examples_;
};

}  // namespace zsrobust

#endif  // ZSROBUST_COMMON_DATASET_H_
