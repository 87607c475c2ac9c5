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

#include "zsrobust/common/dataset.h"

#include "zsrobust/common/error.h"
#include "zsrobust/common/hash.h"

namespace zsrobust {

Dataset::Dataset(std::string name, std::vector<std::string> class_names,
                 std::vector<LabeledExample> examples)
    : name_(std::move(name)),
      class_names_(std::move(class_names)),
      examples_(std::move(examples)) {}

ImageShape Dataset::input_shape() const {
  if (examples_.empty()) throw InvalidArgumentError("dataset '" + name_ + "' is empty");
  const ImageShape shape = examples_.front().image.shape();
  for (const auto& ex : examples_) {
    if (ex.image.shape() != shape) {
      throw ShapeMismatchError("dataset '" + name_ + "' mixes image shapes " +
                               shape.ToString() + " and " + ex.image.shape().ToString());
    }
  }
  return shape;
}

void Dataset::Validate() const {
  if (class_names_.empty()) throw InvalidArgumentError("dataset has no classes");
  const int c = num_classes();
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const auto& ex = examples_[i];
    if (ex.label < 0 || ex.label >= c) {
      throw InvalidArgumentError("example " + std::to_string(i) + " label " +
                                 std::to_string(ex.label) + " outside [0," +
                                 std::to_string(c) + ")");
    }
    if (ex.target) {
      if (*ex.target < 0 || *ex.target >= c || *ex.target == ex.label) {
        throw InvalidArgumentError("example " + std::to_string(i) + " has invalid target");
      }
    }
    ex.image.Validate();
  }
  if (!examples_.empty()) input_shape();
}

std::string Dataset::ContentHash() const {
  Sha256 h;
  h.UpdateU64(class_names_.size());
  for (const auto& name : class_names_) {
    h.UpdateU64(name.size());
    h.Update(name);
  }
  h.UpdateU64(examples_.size());
  for (const auto& ex : examples_) {
    h.UpdateU64(static_cast<std::uint64_t>(ex.label));
    h.UpdateU64(ex.target ? static_cast<std::uint64_t>(*ex.target) + 1 : 0);
    h.UpdateU64(static_cast<std::uint64_t>(ex.image.height()));
    h.UpdateU64(static_cast<std::uint64_t>(ex.image.width()));
    for (double v : ex.image.data()) h.UpdateF32(v);
  }
  return h.HexDigest();
}

std::string Dataset::Identity() const {
  return name_ + "@" + ContentHash().substr(0, 16);
}

Dataset Dataset::Subset(const std::vector<std::size_t>& indices, std::string name) const {
  Dataset out(std::move(name), class_names_);
  for (std::size_t i : indices) {
    if (i >= examples_.size()) throw InvalidArgumentError("subset index out of range");
    out.Add(examples_[i]);
  }
  return out;
}

}  // namespace zsrobust
