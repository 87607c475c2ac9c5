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

#include "zsrobust/attacks/estimator.h"

#include <bit>
#include <numeric>

#include "zsrobust/common/error.h"

namespace zsrobust {
namespace {

// Randomly signed rows of a Sylvester-Hadamard matrix, skipping the
// all-ones column so every coordinate is balanced over a full block.
class HadamardRademacher {
 public:
  HadamardRademacher(Eigen::Index dims, Rng& rng) : dims_(dims), rng_(rng) {
    order_ = std::bit_ceil(static_cast<std::uint64_t>(dims) + 1);
  }

  Vec Next() {
    if (row_ == order_ || signs_.size() == 0) StartBlock();
    Vec d(dims_);
    const std::uint64_t r = row_ ^ scramble_;
    for (Eigen::Index j = 0; j < dims_; ++j) {
      const auto col = static_cast<std::uint64_t>(j) + 1;
      const double h = (std::popcount(r & col) & 1) ? -1.0 : 1.0;
      d(j) = signs_(j) * h;
    }
    ++row_;
    return d;
  }

 private:
  void StartBlock() {
    std::bernoulli_distribution coin(0.5);
    signs_.resize(dims_);
    for (Eigen::Index j = 0; j < dims_; ++j) signs_(j) = coin(rng_) ? 1.0 : -1.0;
    scramble_ = std::uniform_int_distribution<std::uint64_t>(0, order_ - 1)(rng_);
    row_ = 0;
  }

  Eigen::Index dims_;
  Rng& rng_;
  std::uint64_t order_ = 1;
  std::uint64_t row_ = 0;
  std::uint64_t scramble_ = 0;
  Vec signs_;
};

}  // namespace

GradientEstimate EstimateGradient(const ScalarLoss& loss, const Vec& x, AttackMethod method,
                                  int samples, double sigma, Rng& rng) {
  if (method != AttackMethod::kNes && method != AttackMethod::kSpsa) {
    throw InvalidArgumentError("gradient estimation needs NES or SPSA");
  }
  if (samples < 2 || samples % 2 != 0) {
    throw InvalidArgumentError("estimator sample count must be even and >= 2, got " +
                               std::to_string(samples));
  }
  if (!(sigma > 0)) throw InvalidArgumentError("estimator sigma must be positive");
  GradientEstimate est;
  est.gradient = Vec::Zero(x.size());
  if (method == AttackMethod::kNes) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec u(x.size());
    for (int i = 0; i < samples; ++i) {
      for (Eigen::Index j = 0; j < u.size(); ++j) u(j) = normal(rng);
      const double diff = loss(x + sigma * u) - loss(x - sigma * u);
      est.gradient += diff * u;
    }
    est.gradient /= 2.0 * sigma * samples;
  } else {
    HadamardRademacher directions(x.size(), rng);
    for (int i = 0; i < samples; ++i) {
      const Vec d = directions.Next();
      const double diff = loss(x + sigma * d) - loss(x - sigma * d);
      // d_j is +/-1, so dividing by it is multiplying by it.
      est.gradient += (diff / (2.0 * sigma)) * d;
    }
    est.gradient /= samples;
  }
  est.queries = 2L * samples;
  if (!est.gradient.allFinite()) throw NumericError("gradient estimate is not finite");
  return est;
}

GradientEstimate EstimateGradientBlackBox(const ClassifierModel& model, const Image& image,
                                          int label, const AttackConfig& config, Rng& rng) {
  if (label < 0 || label >= model.num_classes()) {
    throw InvalidArgumentError("label " + std::to_string(label) + " out of range");
  }
  const ImageShape shape = model.input_shape();
  const ScalarLoss loss = [&](const Vec& v) {
    Image probe(shape.height, shape.width, std::vector<double>(v.data(), v.data() + v.size()));
    return CrossEntropy(ForwardLogits(model, probe), label);
  };
  const Vec x = Eigen::Map<const Vec>(image.data().data(), static_cast<Eigen::Index>(image.size()));
  return EstimateGradient(loss, x, config.method, config.ResolvedSamples(), config.sigma, rng);
}

}  // namespace zsrobust
