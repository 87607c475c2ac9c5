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

#ifndef ZSROBUST_MODEL_TAPE_H_
#define ZSROBUST_MODEL_TAPE_H_

#include <functional>
#include <span>
#include <vector>

#include "zsrobust/common/tensor.h"

namespace zsrobust {

// Minimal reverse-mode tape over row-major matrices. Rows index batch items.
// Holds only the handful of ops the reference networks need; every op's
// backward rule is checked against central differences in tape_test.
class Tape {
 public:
  struct Var {
    int id = -1;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Values that never receive gradients. The Ref variants borrow `value`,
  // which must outlive the tape.
  Var Constant(Mat value);
  Var ConstantRef(const Mat& value);
  // Values whose gradient is accumulated by Backward().
  Var Leaf(Mat value);
  Var LeafRef(const Mat& value);

  const Mat& value(Var v) const;
  // Zero-sized until Backward() reaches the node.
  const Mat& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  Var MatMul(Var a, Var b);
  // a * b^T
  Var MatMulTransposed(Var a, Var b);
  Var Add(Var a, Var b);
  // Adds a 1 x m row to every row of a.
  Var AddRow(Var a, Var row);
  Var Scale(Var a, double s);
  // Multiplies every element by the 1 x 1 value s.
  Var ScaleBy(Var a, Var s);
  Var Relu(Var a);
  // exp(clamp(a, lo, hi)) for a 1 x 1 input; zero gradient where clamped.
  Var ExpClamped(Var a, double lo, double hi);
  // Rearranges n x (3*H*W) channel-major images into (n*P) x (3*p*p) patch
  // rows, P = (H/p)*(W/p), patches in raster order.
  Var Patchify(Var images, int height, int width, int patch);
  // Averages consecutive blocks of `group` rows.
  Var GroupMeanRows(Var a, int group);
  Var RowL2Normalize(Var a);
  // Row b of the result is the mean of table rows bags[b].
  Var EmbeddingBagMean(Var table, std::vector<std::vector<int>> bags);
  // Mean over rows of logsumexp(row) - row[label].
  Var SoftmaxCrossEntropy(Var logits, std::vector<int> labels);
  // sum(a .* weights), a 1 x 1 result; used for vector-Jacobian products.
  Var WeightedSum(Var a, Mat weights);

  // Seeds d(out)/d(out) = 1 for a 1 x 1 output and propagates backwards.
  void Backward(Var out);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat owned;
    const Mat* ref = nullptr;
    Mat grad;
    bool requires_grad = false;
    std::function<void()> backward;
  };

  Var Push(Mat value, bool requires_grad);
  const Mat& Value(int id) const {
    return nodes_[id].ref ? *nodes_[id].ref : nodes_[id].owned;
  }
  void Accumulate(int id, const Mat& g);
  template <typename Expr>
  void AccumulateExpr(int id, const Expr& g);
  bool Needs(int id) const { return nodes_[id].requires_grad; }

  std::vector<Node> nodes_;
};

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_TAPE_H_
