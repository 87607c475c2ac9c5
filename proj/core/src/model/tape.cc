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

#include "zsrobust/model/tape.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "zsrobust/common/error.h"

namespace zsrobust {
namespace {

const Mat kEmpty;

void CheckSameShape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatchError(std::string(op) + ": " + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

Tape::Var Tape::Push(Mat value, bool requires_grad) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Var Tape::Constant(Mat value) { return Push(std::move(value), false); }

Tape::Var Tape::ConstantRef(const Mat& value) {
  Var v = Push(Mat(), false);
  nodes_[v.id].ref = &value;
  return v;
}

Tape::Var Tape::Leaf(Mat value) { return Push(std::move(value), true); }

Tape::Var Tape::LeafRef(const Mat& value) {
  Var v = Push(Mat(), true);
  nodes_[v.id].ref = &value;
  return v;
}

const Mat& Tape::value(Var v) const { return Value(v.id); }

const Mat& Tape::grad(Var v) const {
  const Mat& g = nodes_[v.id].grad;
  return g.size() == 0 ? kEmpty : g;
}

void Tape::Accumulate(int id, const Mat& g) { AccumulateExpr(id, g); }

template <typename Expr>
void Tape::AccumulateExpr(int id, const Expr& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

Tape::Var Tape::MatMul(Var a, Var b) {
  const Mat& av = Value(a.id);
  const Mat& bv = Value(b.id);
  if (av.cols() != bv.rows()) {
    throw ShapeMismatchError("MatMul inner dimensions " + std::to_string(av.cols()) +
                             " vs " + std::to_string(bv.rows()));
  }
  Var out = Push(av * bv, Needs(a.id) || Needs(b.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, b, o] {
    const Mat& g = nodes_[o].grad;
    if (Needs(a.id)) AccumulateExpr(a.id, g * Value(b.id).transpose());
    if (Needs(b.id)) AccumulateExpr(b.id, Value(a.id).transpose() * g);
  };
  return out;
}

Tape::Var Tape::MatMulTransposed(Var a, Var b) {
  const Mat& av = Value(a.id);
  const Mat& bv = Value(b.id);
  if (av.cols() != bv.cols()) {
    throw ShapeMismatchError("MatMulTransposed column mismatch");
  }
  Var out = Push(av * bv.transpose(), Needs(a.id) || Needs(b.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, b, o] {
    const Mat& g = nodes_[o].grad;
    if (Needs(a.id)) AccumulateExpr(a.id, g * Value(b.id));
    if (Needs(b.id)) AccumulateExpr(b.id, g.transpose() * Value(a.id));
  };
  return out;
}

Tape::Var Tape::Add(Var a, Var b) {
  CheckSameShape(Value(a.id), Value(b.id), "Add");
  Var out = Push(Value(a.id) + Value(b.id), Needs(a.id) || Needs(b.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, b, o] {
    Accumulate(a.id, nodes_[o].grad);
    Accumulate(b.id, nodes_[o].grad);
  };
  return out;
}

Tape::Var Tape::AddRow(Var a, Var row) {
  const Mat& av = Value(a.id);
  const Mat& rv = Value(row.id);
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw ShapeMismatchError("AddRow expects a 1 x " + std::to_string(av.cols()) + " row");
  }
  Mat result = av;
  result.rowwise() += rv.row(0);
  Var out = Push(std::move(result), Needs(a.id) || Needs(row.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, row, o] {
    const Mat& g = nodes_[o].grad;
    Accumulate(a.id, g);
    if (Needs(row.id)) AccumulateExpr(row.id, g.colwise().sum());
  };
  return out;
}

Tape::Var Tape::Scale(Var a, double s) {
  Var out = Push(Value(a.id) * s, Needs(a.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, s, o] { AccumulateExpr(a.id, nodes_[o].grad * s); };
  return out;
}

Tape::Var Tape::ScaleBy(Var a, Var s) {
  const Mat& sv = Value(s.id);
  if (sv.rows() != 1 || sv.cols() != 1) throw ShapeMismatchError("ScaleBy expects 1x1");
  Var out = Push(Value(a.id) * sv(0, 0), Needs(a.id) || Needs(s.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, s, o] {
    const Mat& g = nodes_[o].grad;
    const double scale = Value(s.id)(0, 0);
    if (Needs(a.id)) AccumulateExpr(a.id, g * scale);
    if (Needs(s.id)) {
      Mat gs(1, 1);
      gs(0, 0) = g.cwiseProduct(Value(a.id)).sum();
      Accumulate(s.id, gs);
    }
  };
  return out;
}

Tape::Var Tape::Relu(Var a) {
  Var out = Push(Value(a.id).cwiseMax(0.0), Needs(a.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, o] {
    const Mat& x = Value(a.id);
    Mat g = nodes_[o].grad;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (x.data()[i] <= 0.0) g.data()[i] = 0.0;
    }
    Accumulate(a.id, g);
  };
  return out;
}

Tape::Var Tape::ExpClamped(Var a, double lo, double hi) {
  const Mat& av = Value(a.id);
  if (av.rows() != 1 || av.cols() != 1) throw ShapeMismatchError("ExpClamped expects 1x1");
  const double x = av(0, 0);
  Mat result(1, 1);
  result(0, 0) = std::exp(std::clamp(x, lo, hi));
  Var out = Push(std::move(result), Needs(a.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, lo, hi, o] {
    const double x = Value(a.id)(0, 0);
    Mat g(1, 1);
    g(0, 0) = (x < lo || x > hi) ? 0.0 : nodes_[o].grad(0, 0) * Value(o)(0, 0);
    Accumulate(a.id, g);
  };
  return out;
}

Tape::Var Tape::Patchify(Var images, int height, int width, int patch) {
  const Mat& x = Value(images.id);
  if (patch <= 0 || height % patch != 0 || width % patch != 0) {
    throw ShapeMismatchError("patch size " + std::to_string(patch) +
                             " does not tile " + std::to_string(height) + "x" +
                             std::to_string(width));
  }
  const int channels = 3;
  if (x.cols() != static_cast<Eigen::Index>(channels) * height * width) {
    throw ShapeMismatchError("Patchify input has " + std::to_string(x.cols()) +
                             " columns, expected " +
                             std::to_string(channels * height * width));
  }
  const int ph = height / patch;
  const int pw = width / patch;
  const int per_image = ph * pw;
  const int patch_dim = channels * patch * patch;
  const Eigen::Index n = x.rows();
  // index[r * patch_dim + k] is the source column of patch element k.
  std::vector<int> index(static_cast<std::size_t>(per_image) * patch_dim);
  for (int py = 0; py < ph; ++py) {
    for (int px = 0; px < pw; ++px) {
      const int p = py * pw + px;
      for (int c = 0; c < channels; ++c) {
        for (int dy = 0; dy < patch; ++dy) {
          for (int dx = 0; dx < patch; ++dx) {
            const int k = (c * patch + dy) * patch + dx;
            const int y = py * patch + dy;
            const int xx = px * patch + dx;
            index[static_cast<std::size_t>(p) * patch_dim + k] = (c * height + y) * width + xx;
          }
        }
      }
    }
  }
  Mat result(n * per_image, patch_dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int p = 0; p < per_image; ++p) {
      for (int k = 0; k < patch_dim; ++k) {
        result(i * per_image + p, k) = x(i, index[static_cast<std::size_t>(p) * patch_dim + k]);
      }
    }
  }
  Var out = Push(std::move(result), Needs(images.id));
  const int o = out.id;
  nodes_[o].backward = [this, images, index = std::move(index), per_image, patch_dim, o] {
    const Mat& g = nodes_[o].grad;
    const Mat& xv = Value(images.id);
    Mat gx = Mat::Zero(xv.rows(), xv.cols());
    for (Eigen::Index i = 0; i < xv.rows(); ++i) {
      for (int p = 0; p < per_image; ++p) {
        for (int k = 0; k < patch_dim; ++k) {
          gx(i, index[static_cast<std::size_t>(p) * patch_dim + k]) += g(i * per_image + p, k);
        }
      }
    }
    Accumulate(images.id, gx);
  };
  return out;
}

Tape::Var Tape::GroupMeanRows(Var a, int group) {
  const Mat& av = Value(a.id);
  if (group <= 0 || av.rows() % group != 0) {
    throw ShapeMismatchError("GroupMeanRows group does not divide rows");
  }
  const Eigen::Index n = av.rows() / group;
  Mat result(n, av.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    result.row(i) = av.middleRows(i * group, group).colwise().mean();
  }
  Var out = Push(std::move(result), Needs(a.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, group, o] {
    const Mat& g = nodes_[o].grad;
    Mat ga(g.rows() * group, g.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (int j = 0; j < group; ++j) ga.row(i * group + j) = g.row(i) / group;
    }
    Accumulate(a.id, ga);
  };
  return out;
}

Tape::Var Tape::RowL2Normalize(Var a) {
  const Mat& av = Value(a.id);
  Vec norms = av.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) norms(i) = std::max(norms(i), 1e-12);
  Mat result = av;
  for (Eigen::Index i = 0; i < av.rows(); ++i) result.row(i) /= norms(i);
  Var out = Push(std::move(result), Needs(a.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, norms = std::move(norms), o] {
    const Mat& g = nodes_[o].grad;
    const Mat& y = Value(o);
    Mat ga(g.rows(), g.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const double dot = g.row(i).dot(y.row(i));
      ga.row(i) = (g.row(i) - dot * y.row(i)) / norms(i);
    }
    Accumulate(a.id, ga);
  };
  return out;
}

Tape::Var Tape::EmbeddingBagMean(Var table, std::vector<std::vector<int>> bags) {
  const Mat& tv = Value(table.id);
  Mat result = Mat::Zero(static_cast<Eigen::Index>(bags.size()), tv.cols());
  for (std::size_t b = 0; b < bags.size(); ++b) {
    if (bags[b].empty()) throw InvalidArgumentError("EmbeddingBagMean: empty bag");
    for (int id : bags[b]) {
      if (id < 0 || id >= tv.rows()) {
        throw InvalidArgumentError("EmbeddingBagMean: token id " + std::to_string(id) +
                                   " outside table of " + std::to_string(tv.rows()));
      }
      result.row(static_cast<Eigen::Index>(b)) += tv.row(id);
    }
    result.row(static_cast<Eigen::Index>(b)) /= static_cast<double>(bags[b].size());
  }
  Var out = Push(std::move(result), Needs(table.id));
  const int o = out.id;
  nodes_[o].backward = [this, table, bags = std::move(bags), o] {
    const Mat& g = nodes_[o].grad;
    const Mat& tv = Value(table.id);
    Mat gt = Mat::Zero(tv.rows(), tv.cols());
    for (std::size_t b = 0; b < bags.size(); ++b) {
      const double w = 1.0 / static_cast<double>(bags[b].size());
      for (int id : bags[b]) gt.row(id) += w * g.row(static_cast<Eigen::Index>(b));
    }
    Accumulate(table.id, gt);
  };
  return out;
}

Tape::Var Tape::SoftmaxCrossEntropy(Var logits, std::vector<int> labels) {
  const Mat& z = Value(logits.id);
  if (static_cast<std::size_t>(z.rows()) != labels.size()) {
    throw ShapeMismatchError("SoftmaxCrossEntropy: label count mismatch");
  }
  Mat probs(z.rows(), z.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= z.cols()) {
      throw InvalidArgumentError("SoftmaxCrossEntropy: label out of range");
    }
    const double m = z.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      probs(i, j) = std::exp(z(i, j) - m);
      sum += probs(i, j);
    }
    probs.row(i) /= sum;
    total += m + std::log(sum) - z(i, label);
  }
  Mat result(1, 1);
  result(0, 0) = total / static_cast<double>(z.rows());
  Var out = Push(std::move(result), Needs(logits.id));
  const int o = out.id;
  nodes_[o].backward = [this, logits, labels = std::move(labels),
                        probs = std::move(probs), o] {
    Mat g = probs;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      g(static_cast<Eigen::Index>(i), labels[i]) -= 1.0;
    }
    g *= nodes_[o].grad(0, 0) / static_cast<double>(labels.size());
    Accumulate(logits.id, g);
  };
  return out;
}

Tape::Var Tape::WeightedSum(Var a, Mat weights) {
  CheckSameShape(Value(a.id), weights, "WeightedSum");
  Mat result(1, 1);
  result(0, 0) = Value(a.id).cwiseProduct(weights).sum();
  Var out = Push(std::move(result), Needs(a.id));
  const int o = out.id;
  nodes_[o].backward = [this, a, weights = std::move(weights), o] {
    AccumulateExpr(a.id, weights * nodes_[o].grad(0, 0));
  };
  return out;
}

void Tape::Backward(Var out) {
  const Mat& v = Value(out.id);
  if (v.rows() != 1 || v.cols() != 1) {
    throw ShapeMismatchError("Backward expects a 1x1 output");
  }
  for (auto& n : nodes_) n.grad.resize(0, 0);
  if (!nodes_[out.id].requires_grad) return;
  nodes_[out.id].grad = Mat::Ones(1, 1);
  for (int id = out.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.size() == 0 || !n.backward) continue;
    n.backward();
  }
}

}  // namespace zsrobust
