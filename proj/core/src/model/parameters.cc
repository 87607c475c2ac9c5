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

#include "zsrobust/model/parameters.h"

#include <cmath>

#include "zsrobust/common/error.h"

namespace zsrobust {

void ParameterSet::Add(const std::string& name, Mat value) {
  if (values_.count(name)) throw InvalidArgumentError("duplicate parameter " + name);
  names_.push_back(name);
  values_.emplace(name, std::move(value));
}

bool ParameterSet::Contains(const std::string& name) const { return values_.count(name) > 0; }

const Mat& ParameterSet::Get(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw InvalidArgumentError("unknown parameter " + name);
  return it->second;
}

Mat& ParameterSet::Get(const std::string& name) {
  auto it = values_.find(name);
  if (it == values_.end()) throw InvalidArgumentError("unknown parameter " + name);
  return it->second;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, value] : values_) n += static_cast<std::size_t>(value.size());
  return n;
}

void ParameterSet::RoundToFloat() {
  for (auto& [name, value] : values_) {
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      value.data()[i] = static_cast<double>(static_cast<float>(value.data()[i]));
    }
  }
}

bool ParameterSet::operator==(const ParameterSet& other) const {
  if (names_ != other.names_) return false;
  for (const auto& name : names_) {
    const Mat& a = Get(name);
    const Mat& b = other.Get(name);
    if (a.rows() != b.rows() || a.cols() != b.cols() || a != b) return false;
  }
  return true;
}

Tape::Var ParameterBinder::Bind(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  const Mat& value = params_.Get(name);
  Tape::Var v = track_ ? tape_.LeafRef(value) : tape_.ConstantRef(value);
  bound_.emplace(name, v);
  return v;
}

ParameterSet ParameterBinder::Gradients() const {
  ParameterSet grads;
  for (const auto& name : params_.names()) {
    const Mat& value = params_.Get(name);
    auto it = bound_.find(name);
    if (it != bound_.end() && tape_.grad(it->second).size() != 0) {
      grads.Add(name, tape_.grad(it->second));
    } else {
      grads.Add(name, Mat::Zero(value.rows(), value.cols()));
    }
  }
  return grads;
}

void AdamOptimizer::Step(ParameterSet& params, const ParameterSet& grads) {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (const auto& name : params.names()) {
    Mat& p = params.Get(name);
    const Mat& g = grads.Get(name);
    auto [mit, m_new] = m_.try_emplace(name, Mat::Zero(p.rows(), p.cols()));
    auto [vit, v_new] = v_.try_emplace(name, Mat::Zero(p.rows(), p.cols()));
    Mat& m = mit->second;
    Mat& v = vit->second;
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }
}

}  // namespace zsrobust
