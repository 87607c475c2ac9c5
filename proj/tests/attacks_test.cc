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
#include "zsrobust/attacks/attack.h"
#include "zsrobust/attacks/diversity.h"
#include "zsrobust/attacks/evaluate.h"
#include "zsrobust/common/error.h"
#include "zsrobust/metrics/accuracy.h"
#include "zsrobust/model/snapshot.h"

namespace zsrobust {
namespace {

using testing::LinearOracleExample;
using testing::LinearOracleModel;
using testing::RandomImage;

constexpr double kOracleDistance = 0.05;
const double kBisectionTol = std::ldexp(1.0, -12);

AttackConfig Config(AttackMethod method, AttackMode mode, double eps = 8.0 / 255) {
  AttackConfig c;
  c.method = method;
  c.mode = mode;
  c.epsilon = eps;
  return c;
}

TEST(AttackConfigTest, JsonRoundTripAndValidation) {
  AttackConfig c = Config(AttackMethod::kMim, AttackMode::kMinPerturbation, 0.1);
  c.steps = 7;
  c.samples = 10;
  const AttackConfig back = AttackConfigFromJson(AttackConfigToJson(c));
  EXPECT_EQ(AttackConfigToJson(back), AttackConfigToJson(c));
  EXPECT_THROW(AttackConfigFromJson({{"method", "fgsm"}, {"bogus", 1}}), ConfigError);
  AttackConfig bad;
  bad.epsilon = 1.5;
  EXPECT_THROW(bad.Validate(), InvalidArgumentError);
  bad = AttackConfig{};
  bad.samples = 3;
  EXPECT_THROW(bad.Validate(), InvalidArgumentError);
  bad = AttackConfig{};
  bad.sigma = 0;
  EXPECT_THROW(bad.Validate(), InvalidArgumentError);
  bad = AttackConfig{};
  bad.steps = 0;
  EXPECT_THROW(bad.Validate(), InvalidArgumentError);
}

TEST(AttackConfigTest, IterationDefaults) {
  EXPECT_EQ(Config(AttackMethod::kBim, AttackMode::kBudgeted).ResolvedSteps(), 12);
  EXPECT_EQ(Config(AttackMethod::kMim, AttackMode::kMinPerturbation).ResolvedSteps(), 20);
  EXPECT_EQ(Config(AttackMethod::kDeepFool, AttackMode::kBudgeted).ResolvedSteps(), 50);
  EXPECT_DOUBLE_EQ(Config(AttackMethod::kBim, AttackMode::kBudgeted).ResolvedStepSize(8.0 / 255),
                   1.0 / 255);
  EXPECT_DOUBLE_EQ(AttackConfig{}.epsilon, 8.0 / 255);
}

TEST(WhiteBoxTest, ZeroBudgetLeavesInputUntouched) {
  const auto model = LinearOracleModel();
  LabeledExample ex = LinearOracleExample();
  AttackOutcome o = RunWhiteBoxAttack(*model, ex, Config(AttackMethod::kFgsm, AttackMode::kBudgeted, 0));
  EXPECT_EQ(o.adversarial, ex.image);
  EXPECT_FALSE(o.success);
  ex.label = 1;  // already misclassified
  o = RunWhiteBoxAttack(*model, ex, Config(AttackMethod::kFgsm, AttackMode::kBudgeted, 0));
  EXPECT_TRUE(o.success);
}

TEST(WhiteBoxTest, FgsmOnLinearOracle) {
  const auto model = LinearOracleModel();
  const auto ex = LinearOracleExample();
  EXPECT_TRUE(RunWhiteBoxAttack(*model, ex, Config(AttackMethod::kFgsm, AttackMode::kBudgeted, 0.06)).success);
  EXPECT_FALSE(RunWhiteBoxAttack(*model, ex, Config(AttackMethod::kFgsm, AttackMode::kBudgeted, 0.04)).success);
}

class MinPerturbationTest : public ::testing::TestWithParam<AttackMethod> {};

TEST_P(MinPerturbationTest, LinearOracleDistance) {
  const auto model = LinearOracleModel();
  const AttackOutcome o = RunWhiteBoxAttack(*model, LinearOracleExample(),
                                            Config(GetParam(), AttackMode::kMinPerturbation));
  EXPECT_TRUE(o.found_min);
  EXPECT_TRUE(o.success);
  EXPECT_NEAR(o.min_distance, kOracleDistance, kBisectionTol);
  EXPECT_LE(o.linf_distance, o.min_distance + 1e-12);
  EXPECT_GE(o.total_queries, o.queries);
}

// With enough bisection resolution the found distance succeeds on replay
// and fails just below it.
TEST_P(MinPerturbationTest, ReplayConsistency) {
  const auto model = LinearOracleModel();
  AttackConfig c = Config(GetParam(), AttackMode::kMinPerturbation);
  c.bisection_steps = 24;
  const auto ex = LinearOracleExample();
  const AttackOutcome o = RunWhiteBoxAttack(*model, ex, c);
  ASSERT_TRUE(o.found_min);
  EXPECT_TRUE(RunWhiteBoxAttackAt(*model, ex, c, o.min_distance).success);
  EXPECT_FALSE(RunWhiteBoxAttackAt(*model, ex, c, o.min_distance * (1 - std::ldexp(1.0, -10))).success);
}

INSTANTIATE_TEST_SUITE_P(SignMethods, MinPerturbationTest,
                         ::testing::Values(AttackMethod::kFgsm, AttackMethod::kBim,
                                           AttackMethod::kMim, AttackMethod::kDim),
                         [](const auto& info) { return AttackMethodName(info.param); });

TEST(DeepFoolTest, LinearOracleWithOvershoot) {
  const auto model = LinearOracleModel();
  const AttackOutcome o = RunWhiteBoxAttack(*model, LinearOracleExample(),
                                            Config(AttackMethod::kDeepFool, AttackMode::kMinPerturbation));
  EXPECT_TRUE(o.success);
  EXPECT_TRUE(o.found_min);
  EXPECT_NEAR(o.linf_distance, kOracleDistance * 1.02, 1e-4);
}

TEST(DeepFoolTest, BudgetedRespectsEpsilon) {
  const auto model = LinearOracleModel();
  const AttackOutcome o = RunWhiteBoxAttack(*model, LinearOracleExample(),
                                            Config(AttackMethod::kDeepFool, AttackMode::kBudgeted, 0.03));
  EXPECT_LE(o.linf_distance, 0.03 + 1e-12);
  EXPECT_FALSE(o.success);
}

TEST(MinPerturbationSearchTest, AlreadyMisclassifiedIsZero) {
  const auto model = LinearOracleModel();
  LabeledExample ex = LinearOracleExample();
  ex.label = 1;
  const AttackOutcome o = RunWhiteBoxAttack(*model, ex, Config(AttackMethod::kBim, AttackMode::kMinPerturbation));
  EXPECT_TRUE(o.success);
  EXPECT_TRUE(o.found_min);
  EXPECT_EQ(o.min_distance, 0.0);
}

TEST(MinPerturbationSearchTest, UnfoundIsFlaggedAtEpsilonMax) {
  AttackConfig c;
  c.mode = AttackMode::kMinPerturbation;
  c.epsilon_max = 0.5;
  int calls = 0;
  const AttackOutcome o = FindMinPerturbation(
      [&](double) {
        ++calls;
        AttackOutcome r;
        r.queries = 1;
        return r;
      },
      c);
  EXPECT_FALSE(o.found_min);
  EXPECT_TRUE(o.flagged);
  EXPECT_EQ(o.min_distance, 0.5);
  EXPECT_EQ(calls, 2);
  EXPECT_EQ(o.total_queries, 2);
}

// Every adversarial image stays inside [x - eps, x + eps] and [0, 1].
TEST(BoxConstraintTest, AllMethodsStayInsideTheBall) {
  const auto model = testing::RandomLinearModel(5, 4, 4, 3);
  std::mt19937_64 rng(7);
  for (AttackMethod m : {AttackMethod::kFgsm, AttackMethod::kBim, AttackMethod::kMim,
                         AttackMethod::kDim, AttackMethod::kDeepFool, AttackMethod::kNes,
                         AttackMethod::kSpsa}) {
    for (double eps : {0.0, 2.0 / 255, 8.0 / 255, 0.3}) {
      AttackConfig c = Config(m, AttackMode::kBudgeted, eps);
      c.samples = 8;
      for (int i = 0; i < 6; ++i) {
        Image img = RandomImage(4, 4, rng);
        if (i == 0) img.mutable_data()[0] = 0.0;
        if (i == 1) img.mutable_data()[1] = 1.0;
        const LabeledExample ex{img, i % 5, std::nullopt};
        const AttackOutcome o = RunAttack(*model, ex, c, static_cast<std::uint64_t>(i));
        for (std::size_t k = 0; k < img.size(); ++k) {
          const double a = o.adversarial.data()[k], x = img.data()[k];
          ASSERT_GE(a, std::max(0.0, x - eps) - 1e-12) << AttackMethodName(m);
          ASSERT_LE(a, std::min(1.0, x + eps) + 1e-12) << AttackMethodName(m);
        }
        ASSERT_NEAR(o.linf_distance, LinfDistance(img, o.adversarial), 1e-6);
        ASSERT_LE(o.linf_distance, eps + 1e-6);
      }
    }
  }
}

TEST(ProjectTest, ClipsToBallAndUnitBox) {
  const Image clean(1, 1, std::vector<double>{0.5, 0.02, 0.99});
  Image cand(1, 1, std::vector<double>{0.9, -0.3, 0.995});
  ProjectToBall(clean, 0.1, cand);
  EXPECT_DOUBLE_EQ(cand.data()[0], 0.6);
  EXPECT_DOUBLE_EQ(cand.data()[1], 0.0);
  EXPECT_DOUBLE_EQ(cand.data()[2], 0.995);
}

// Binary linear model with logits +-(w.x)/2: robust accuracy under FGSM at
// eps is the fraction of correctly classified samples with margin/|w|_1 > eps.
TEST(EvaluateTest, MarginCountingOracleAndMonotonicity) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0, 1);
  Vec w(12);
  for (int i = 0; i < 12; ++i) w[i] = n(rng);
  Mat cw(2, 12);
  cw.row(0) = 0.5 * w.transpose();
  cw.row(1) = -0.5 * w.transpose();
  const auto model = NetworkClassifier::FromLinearWeights({2, 2, 3}, cw, Vec::Zero(2));
  Dataset ds("margins", {"pos", "neg"});
  std::uniform_real_distribution<double> u(0.2, 0.8);
  for (int i = 0; i < 200; ++i) {
    Image img(2, 2);
    for (double& v : img.mutable_data()) v = u(rng);
    const double s = w.dot(Eigen::Map<const Vec>(img.data().data(), 12));
    ds.Add({img, (i % 7 == 0) == (s > 0) ? 1 : 0, std::nullopt});
  }
  double previous = 1.0;
  for (int k : {0, 2, 4, 8, 16}) {
    const double eps = k / 255.0;
    const auto eval = EvaluateUnderAttack(*model, ds, Config(AttackMethod::kFgsm, AttackMode::kBudgeted, eps), 1);
    int robust = 0;
    for (const auto& ex : ds.examples()) {
      const double s = w.dot(Eigen::Map<const Vec>(ex.image.data().data(), 12));
      const double margin = ex.label == 0 ? s : -s;
      if (margin > 0 && margin / w.lpNorm<1>() > eps) ++robust;
    }
    EXPECT_NEAR(eval.summary.robust_accuracy, robust / 200.0, 1e-12) << "eps " << k << "/255";
    EXPECT_LE(eval.summary.robust_accuracy, previous);
    previous = eval.summary.robust_accuracy;
    if (k == 0) {
      EXPECT_DOUBLE_EQ(eval.summary.robust_accuracy, EvaluateAccuracy(*model, ds).accuracy);
    }
  }
}

TEST(EvaluateTest, WorkerCountDoesNotChangeResults) {
  const auto model = testing::RandomLinearModel(4, 3, 3, 5);
  const Dataset ds = testing::RandomDataset(30, 4, 3, 3, 5);
  for (AttackMethod m : {AttackMethod::kDim, AttackMethod::kNes, AttackMethod::kSpsa}) {
    AttackConfig c = Config(m, AttackMode::kMinPerturbation);
    c.samples = 6;
    c.steps = 3;
    c.seed = 9;
    const auto a = EvaluateUnderAttack(*model, ds, c, 1);
    for (int workers : {2, 8}) {
      const auto b = EvaluateUnderAttack(*model, ds, c, workers);
      for (std::size_t i = 0; i < ds.size(); ++i) {
        ASSERT_EQ(OutcomeJsonLine(i, c, a.outcomes[i]), OutcomeJsonLine(i, c, b.outcomes[i]));
        ASSERT_EQ(a.outcomes[i].adversarial, b.outcomes[i].adversarial);
      }
      EXPECT_EQ(AttackSummaryToJson(a.summary), AttackSummaryToJson(b.summary));
    }
  }
}

TEST(EvaluateTest, JsonLinesCarryTheDocumentedKeys) {
  const auto model = LinearOracleModel();
  const AttackConfig c = Config(AttackMethod::kFgsm, AttackMode::kMinPerturbation);
  const AttackOutcome o = RunWhiteBoxAttack(*model, LinearOracleExample(), c);
  const auto j = OutcomeJsonLine(3, c, o);
  for (const char* key : {"index", "method", "mode", "epsilon", "success", "linf", "queries", "found_min"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["index"], 3);
  EXPECT_NEAR(j["epsilon"].get<double>(), kOracleDistance, kBisectionTol);
}

TEST(BlackBoxTest, QueryAccountingIsExact) {
  const auto model = testing::RandomLinearModel(3, 2, 2, 8);
  std::mt19937_64 rng(8);
  for (AttackMethod m : {AttackMethod::kNes, AttackMethod::kSpsa}) {
    AttackConfig c = Config(m, AttackMode::kBudgeted, 0.01);
    c.steps = 5;
    c.samples = 6;
    const AttackOutcome o = RunBlackBoxAttack(*model, {RandomImage(2, 2, rng), 0, std::nullopt}, c);
    EXPECT_EQ(o.queries, 5 * 6 * 2);
  }
}

TEST(BlackBoxTest, WhiteBoxMethodsAreRejected) {
  const auto model = LinearOracleModel();
  EXPECT_THROW(RunBlackBoxAttack(*model, LinearOracleExample(), Config(AttackMethod::kFgsm, AttackMode::kBudgeted)),
               InvalidArgumentError);
}

TEST(TransferTest, SelfTransferEqualsWhiteBox) {
  const auto model = testing::RandomLinearModel(4, 3, 3, 12);
  const Dataset ds = testing::RandomDataset(12, 4, 3, 3, 12);
  const auto clone = ClassifierFromSnapshot(DeserializeSnapshot(SerializeSnapshot(ClassifierToSnapshot(*model))));
  for (AttackMethod m : {AttackMethod::kFgsm, AttackMethod::kBim, AttackMethod::kMim, AttackMethod::kDim}) {
    const AttackConfig c = Config(m, AttackMode::kBudgeted);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const AttackOutcome white = RunWhiteBoxAttack(*model, ds[i], c, i);
      const AttackOutcome self = RunTransferAttack(*model, *model, ds[i], c, i);
      const AttackOutcome cloned = RunTransferAttack(*clone, *model, ds[i], c, i);
      ASSERT_EQ(white.adversarial, self.adversarial);
      ASSERT_EQ(white.success, self.success);
      ASSERT_EQ(white.success, cloned.success);
    }
  }
  EXPECT_EQ(ResolveAccess(Config(AttackMethod::kFgsm, AttackMode::kBudgeted), model.get()),
            AttackAccess::kTransfer);
  EXPECT_EQ(ResolveAccess(Config(AttackMethod::kNes, AttackMode::kBudgeted), nullptr),
            AttackAccess::kBlackBox);
}

TEST(TransferTest, ClassCountMismatchIsRejected) {
  const auto a = testing::RandomLinearModel(4, 3, 3, 1);
  const auto b = testing::RandomLinearModel(3, 3, 3, 1);
  const Dataset ds = testing::RandomDataset(1, 3, 3, 3, 1);
  EXPECT_THROW(RunTransferAttack(*a, *b, ds[0], AttackConfig{}), InvalidArgumentError);
}

// A non-finite gradient aborts the sample: the low-level runner throws and
// the per-sample entry point turns that into a flagged outcome.
class NanGradientModel final : public ClassifierModel {
 public:
  int num_classes() const override { return 2; }
  ImageShape input_shape() const override { return {1, 1, 3}; }
  Vec Logits(const Image& image) const override {
    Vec v(2);
    v << image.data()[0], 0.5;
    return v;
  }
  bool has_input_gradient() const override { return true; }
  Vec LossGradient(const Image&, int, LossDirection) const override {
    return Vec::Constant(3, std::nan(""));
  }
  std::string snapshot_id() const override { return "nan"; }
};

TEST(WhiteBoxTest, NonFiniteGradientIsFlagged) {
  NanGradientModel model;
  const LabeledExample ex{Image(1, 1, 0.9), 0, std::nullopt};
  const AttackConfig c = Config(AttackMethod::kBim, AttackMode::kBudgeted);
  EXPECT_THROW(RunWhiteBoxAttack(model, ex, c), NumericError);
  const AttackOutcome o = RunAttack(model, ex, c, 0);
  EXPECT_TRUE(o.flagged);
  EXPECT_FALSE(o.success);
  const Dataset ds("one", {"a", "b"}, {ex});
  const auto eval = EvaluateUnderAttack(model, ds, Config(AttackMethod::kBim, AttackMode::kBudgeted), 1);
  EXPECT_EQ(eval.summary.flagged_count, 1u);
}

// <Apply(x), g> == <x, Adjoint(g)>: the adjoint is exact.
TEST(DiversityTest, ResizePadAdjoint) {
  Rng rng(3);
  std::mt19937_64 data_rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ResizePad t = SampleResizePad(10, 12, 0.6, rng);
    EXPECT_LE(t.resized_height, 10);
    EXPECT_GE(t.resized_height, 6);
    const Image x = RandomImage(10, 12, data_rng);
    const Image tx = t.Apply(x);
    Vec g = Vec::Random(static_cast<Eigen::Index>(tx.size()));
    const Vec adj = t.Adjoint(g);
    double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) lhs += tx.data()[i] * g[static_cast<Eigen::Index>(i)];
    for (std::size_t i = 0; i < x.size(); ++i) rhs += x.data()[i] * adj[static_cast<Eigen::Index>(i)];
    ASSERT_NEAR(lhs, rhs, 1e-9);
  }
}

}  // namespace
}  // namespace zsrobust
