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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.h"
#include "zsrobust/attacks/estimator.h"
#include "zsrobust/common/error.h"

namespace zsrobust {
namespace {

double Cosine(const Vec& a, const Vec& b) { return a.dot(b) / (a.norm() * b.norm()); }

TEST(EstimatorTest, ConstantLossGivesZero) {
  Rng rng(1);
  const Vec x = Vec::Constant(10, 0.5);
  for (AttackMethod m : {AttackMethod::kNes, AttackMethod::kSpsa}) {
    const auto est = EstimateGradient([](const Vec&) { return 3.0; }, x, m, 20, 0.01, rng);
    EXPECT_EQ(est.gradient.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(est.queries, 40);
  }
}

TEST(EstimatorTest, RejectsBadParameters) {
  Rng rng(1);
  const Vec x = Vec::Zero(3);
  const ScalarLoss loss = [](const Vec& v) { return v.sum(); };
  EXPECT_THROW(EstimateGradient(loss, x, AttackMethod::kNes, 7, 0.01, rng), InvalidArgumentError);
  EXPECT_THROW(EstimateGradient(loss, x, AttackMethod::kSpsa, 8, 0.0, rng), InvalidArgumentError);
  EXPECT_THROW(EstimateGradient(loss, x, AttackMethod::kFgsm, 8, 0.01, rng), InvalidArgumentError);
}

// L(x) = |x - x0|^2 has gradient 2 (x - x0).
TEST(EstimatorTest, NesAlignsWithQuadraticGradient) {
  const int d = 48;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = MakeRng(seed, "nes-test");
    std::uniform_real_distribution<double> u(0, 1);
    Vec x(d), x0(d);
    for (int i = 0; i < d; ++i) {
      x[i] = u(rng);
      x0[i] = u(rng);
    }
    const auto est = EstimateGradient([&](const Vec& v) { return (v - x0).squaredNorm(); }, x,
                                      AttackMethod::kNes, 1000, 0.01, rng);
    EXPECT_GE(Cosine(est.gradient, 2 * (x - x0)), 0.95) << "seed " << seed;
  }
}

// L(x) = w.x: averaged simultaneous-perturbation estimates recover w.
TEST(EstimatorTest, SpsaRecoversLinearWeights) {
  Rng rng(5);
  Vec w(2);
  w << 1, -1;
  const Vec x = Vec::Constant(2, 0.5);
  const auto est = EstimateGradient([&](const Vec& v) { return w.dot(v); }, x,
                                    AttackMethod::kSpsa, 500, 0.01, rng);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(est.gradient[i], w[i], 0.05 * std::abs(w[i]));
}

TEST(EstimatorTest, SpsaOverCompleteBlocksIsExact) {
  Rng rng(6);
  std::normal_distribution<double> n(0, 1);
  Vec w(12);
  for (int i = 0; i < 12; ++i) w[i] = n(rng);
  const Vec x = Vec::Constant(12, 0.5);
  const auto est = EstimateGradient([&](const Vec& v) { return w.dot(v); }, x,
                                    AttackMethod::kSpsa, 512, 0.01, rng);
  EXPECT_LE((est.gradient - w).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(EstimatorTest, SpsaDirectionsAreRademacher) {
  Rng rng(7);
  Vec seen = Vec::Zero(5);
  const auto est = EstimateGradient(
      [&](const Vec& v) {
        const Vec d = (v - Vec::Constant(5, 0.5)) / 0.01;
        for (int i = 0; i < 5; ++i) EXPECT_NEAR(std::abs(d[i]), 1.0, 1e-9);
        return 0.0;
      },
      Vec::Constant(5, 0.5), AttackMethod::kSpsa, 16, 0.01, rng);
  EXPECT_EQ(est.queries, 32);
}

TEST(EstimatorTest, SameSeedSameEstimate) {
  const ScalarLoss loss = [](const Vec& v) { return std::sin(v.sum()) + v.squaredNorm(); };
  const Vec x = Vec::LinSpaced(9, 0.1, 0.9);
  for (AttackMethod m : {AttackMethod::kNes, AttackMethod::kSpsa}) {
    Rng a(3), b(3);
    EXPECT_EQ(EstimateGradient(loss, x, m, 10, 0.01, a).gradient,
              EstimateGradient(loss, x, m, 10, 0.01, b).gradient);
  }
}

TEST(EstimatorTest, BlackBoxUsesOnlyLogits) {
  // The echo-style model below has no gradient at all.
  class LogitsOnly final : public ClassifierModel {
   public:
    int num_classes() const override { return 2; }
    ImageShape input_shape() const override { return {1, 1, 3}; }
    Vec Logits(const Image& image) const override {
      Vec v(2);
      v << image.data()[0] - image.data()[1], 0.0;
      return v;
    }
    bool has_input_gradient() const override { return false; }
    std::string snapshot_id() const override { return "logits-only"; }
  } model;
  AttackConfig c;
  c.method = AttackMethod::kSpsa;
  c.samples = 8;
  Rng rng(2);
  const auto est = EstimateGradientBlackBox(model, Image(1, 1, 0.5), 0, c, rng);
  EXPECT_EQ(est.queries, 16);
  // d CE / d x0 = -(1 - p0) with p0 = 1/2 at this point.
  EXPECT_NEAR(est.gradient[0], -0.5, 1e-3);
  EXPECT_NEAR(est.gradient[1], 0.5, 1e-3);
  EXPECT_NEAR(est.gradient[2], 0.0, 1e-9);
}

}  // namespace
}  // namespace zsrobust
