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

#ifndef ZSROBUST_MODEL_PARAMETERS_H_
#define ZSROBUST_MODEL_PARAMETERS_H_

#include <map>
#include <string>
#include <vector>

#include "zsrobust/common/tensor.h"
#include "zsrobust/model/tape.h"

namespace zsrobust {

// Ordered collection of named parameter matrices.
class ParameterSet {
 public:
  void Add(const std::string& name, Mat value);
  bool Contains(const std::string& name) const;
  const Mat& Get(const std::string& name) const;
  Mat& Get(const std::string& name);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  std::size_t scalar_count() const;

  // Rounds every entry to the nearest float so snapshots round-trip exactly.
  void RoundToFloat();

  bool operator==(const ParameterSet& other) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, Mat> values_;
};

// Puts parameters on a tape, either as constants (inference) or as leaves
// whose gradients can be read back after Backward() (training, checks).
class ParameterBinder {
 public:
  ParameterBinder(Tape& tape, const ParameterSet& params, bool track_gradients)
      : tape_(tape), params_(params), track_(track_gradients) {}

  Tape::Var Bind(const std::string& name);
  // Gradients of every bound parameter; unbound or unreached ones are zero.
  ParameterSet Gradients() const;

 private:
  Tape& tape_;
  const ParameterSet& params_;
  bool track_;
  std::map<std::string, Tape::Var> bound_;
};

// Adam over a ParameterSet.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void Step(ParameterSet& params, const ParameterSet& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long step_ = 0;
  std::map<std::string, Mat> m_, v_;
};

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_PARAMETERS_H_
