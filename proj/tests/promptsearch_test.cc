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
#include <limits>
#include <random>

#include "fixtures.h"
#include "zsrobust/common/error.h"
#include "zsrobust/promptsearch/search.h"
#include "zsrobust/shiftgen/toy.h"

namespace zsrobust {
namespace {

using testing::TempDir;

Mat RandomMat(int rows, int cols, std::mt19937_64& g) {
  std::normal_distribution<double> n(0, 1);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(g);
  return m;
}

LinearPromptObjective MakeLinear(const std::string& tmpl, int vocab, int dim, int examples,
                                 std::uint64_t seed) {
  std::mt19937_64 g(seed);
  const PromptTemplate t = PromptTemplate::Parse(tmpl);
  std::vector<Mat> w;
  std::vector<double> off;
  std::normal_distribution<double> n(0, 1);
  for (int b = 0; b < examples; ++b) {
    w.push_back(RandomMat(t.num_triggers(), dim, g));
    off.push_back(n(g));
  }
  return LinearPromptObjective(t, RandomMat(vocab, dim, g), w, off);
}

std::vector<std::size_t> AllOf(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

TEST(PromptTemplateTest, ParsesSlots) {
  const auto t = PromptTemplate::Parse("[T][T] photo of a [C]");
  EXPECT_EQ(t.num_triggers(), 2);
  ASSERT_EQ(t.slots().size(), 6u);
  EXPECT_EQ(t.slots()[2].kind, SlotKind::kLiteral);
  EXPECT_EQ(t.slots()[2].literal, "photo");
  EXPECT_EQ(t.TriggerPosition(1), 1u);
  EXPECT_EQ(t.TriggerOrdinal(1), 1);
  EXPECT_THROW(t.TriggerOrdinal(2), InvalidArgumentError);
  EXPECT_THROW(PromptTemplate::Parse("[T][T]"), ConfigError);
  EXPECT_THROW(PromptTemplate::Parse("[C] a [C] [T]"), ConfigError);
  EXPECT_THROW(PromptTemplate::Parse("a [C]"), ConfigError);
  EXPECT_THROW(PromptTemplate::Parse("[T][X][C]"), ConfigError);
}

// The linear objective is affine in each trigger, so a first-order score
// must equal the true loss of every single-token replacement.
TEST(CandidateScoreTest, TaylorScoresAreExactOnAffineLoss) {
  const auto obj = MakeLinear("[T][T][T][C]", 15, 6, 9, 1);
  const std::vector<int> trig = {3, 7, 11};
  const auto batch = AllOf(9);
  for (int slot = 0; slot < 3; ++slot) {
    const auto pos = obj.prompt_template().TriggerPosition(slot);
    const auto scores = ScoreTokenCandidates(obj, trig, pos, batch, 15);
    EXPECT_NEAR(scores.loss, obj.Loss(trig, batch), 1e-12);
    ASSERT_EQ(scores.candidates.size(), 15u);
    for (const auto& c : scores.candidates) {
      std::vector<int> t = trig;
      t[slot] = c.token;
      EXPECT_NEAR(c.approx_loss, obj.Loss(t, batch), 1e-6);
    }
    for (std::size_t i = 1; i < scores.candidates.size(); ++i) {
      EXPECT_LE(scores.candidates[i - 1].approx_loss, scores.candidates[i].approx_loss);
    }
  }
}

TEST(CandidateScoreTest, NonTriggerSlotIsRejected) {
  const auto obj = MakeLinear("[T] a [C]", 5, 3, 2, 2);
  EXPECT_THROW(ScoreTokenCandidates(obj, {0}, 1, {0, 1}, 3), InvalidArgumentError);
  EXPECT_THROW(ScoreTokenCandidates(obj, {0}, 2, {0, 1}, 3), InvalidArgumentError);
  EXPECT_THROW(ScoreTokenCandidates(obj, {0}, 0, {0, 1}, 0), InvalidArgumentError);
  EXPECT_THROW(ScoreTokenCandidates(obj, {9}, 0, {0, 1}, 3), InvalidArgumentError);
}

TEST(BeamSearchTest, WideBeamEqualsExhaustiveSearch) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto obj = MakeLinear("[T][T][C]", 6, 4, 5, 10 + seed);
    const auto batch = AllOf(5);
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) best = std::min(best, obj.Loss({a, b}, batch));
    }
    PromptSearchConfig cfg;
    cfg.top_k = 6;
    cfg.beam_size = 36;
    cfg.seed = seed;
    const auto r = BeamSearchPrompts(obj, {0, 0}, cfg);
    ASSERT_FALSE(r.beams.empty());
    EXPECT_NEAR(r.beams.front().loss, best, 1e-12);
    EXPECT_EQ(r.steps.size(), 2u);
  }
}

TEST(BeamSearchTest, BestLossNeverIncreasesWithinAStep) {
  const auto obj = MakeLinear("[T][T][T][T][C]", 30, 5, 40, 3);
  PromptSearchConfig cfg;
  cfg.top_k = 4;
  cfg.beam_size = 3;
  cfg.batch_size = 10;
  cfg.steps = 8;
  const auto r = BeamSearchPrompts(obj, {0, 1, 2, 3}, cfg, 2);
  ASSERT_EQ(r.steps.size(), 8u);
  for (const auto& s : r.steps) EXPECT_LE(s.loss_after, s.loss_before + 1e-12);
  EXPECT_EQ(r.candidates.size(), 9u);
  EXPECT_EQ(r.candidates.front().step, 0);
  // Worker count does not change the result.
  const auto again = BeamSearchPrompts(obj, {0, 1, 2, 3}, cfg, 1);
  EXPECT_EQ(again.beams.front().triggers, r.beams.front().triggers);
}

TEST(BeamSearchTest, SingletonVocabularyKeepsTheOnlyPrompt) {
  const auto obj = MakeLinear("[T][T][C]", 1, 3, 2, 4);
  PromptSearchConfig cfg;
  cfg.top_k = 1;
  const auto r = BeamSearchPrompts(obj, {0, 0}, cfg);
  ASSERT_EQ(r.beams.size(), 1u);
  EXPECT_EQ(r.beams.front().triggers, (std::vector<int>{0, 0}));
}

TEST(BeamSearchTest, ScoringBatchIsSeededSubsample) {
  EXPECT_EQ(ScoringBatch(5, 10, 1, 0), AllOf(5));
  const auto a = ScoringBatch(100, 10, 1, 3);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a, ScoringBatch(100, 10, 1, 3));
  EXPECT_NE(a, ScoringBatch(100, 10, 1, 4));
  EXPECT_THROW(ScoringBatch(0, 10, 1, 0), InvalidArgumentError);
}

TEST(EnsembleTest, DeduplicatesByTokenIds) {
  const std::vector<ScoredPrompt> cands = {{{1, 2}, 0.5, 0}, {{1, 2}, 0.4, 1}, {{3, 4}, 0.3, 2}};
  const ValidationScorer scorer = [](const std::vector<int>& t) { return t[0] == 3 ? 0.9 : 0.6; };
  const auto three = SelectPromptEnsemble(cands, scorer, 3);
  EXPECT_EQ(three.members.size(), 2u);
  EXPECT_TRUE(three.insufficient);
  const auto one = SelectPromptEnsemble(cands, scorer, 1);
  ASSERT_EQ(one.members.size(), 1u);
  EXPECT_EQ(one.members[0].triggers, (std::vector<int>{3, 4}));
  EXPECT_FALSE(one.insufficient);
  // Earliest step is kept for duplicates and breaks accuracy ties.
  const auto tie = SelectPromptEnsemble(cands, [](const std::vector<int>&) { return 0.5; }, 2);
  EXPECT_EQ(tie.members[0].triggers, (std::vector<int>{1, 2}));
  EXPECT_EQ(tie.members[0].step, 0);
  EXPECT_THROW(SelectPromptEnsemble({}, scorer, 1), InvalidArgumentError);
  EXPECT_THROW(SelectPromptEnsemble(cands, scorer, 0), InvalidArgumentError);
}

TEST(PromptConfigTest, DefaultsRoundTrip) {
  const PromptSearchConfig def;
  EXPECT_EQ(def.template_text, "[T][T][T][T][C]");
  EXPECT_EQ(def.top_k, 20);
  EXPECT_EQ(def.beam_size, 5);
  EXPECT_EQ(def.ensemble_size, 4);
  EXPECT_EQ(def.ResolvedSteps(4), 4);
  const auto back = PromptSearchConfigFromJson(PromptSearchConfigToJson(def));
  EXPECT_EQ(PromptSearchConfigToJson(back), PromptSearchConfigToJson(def));
  EXPECT_THROW(PromptSearchConfigFromJson({{"beam", 3}}), ConfigError);
  EXPECT_THROW(PromptSearchConfigFromJson({{"top_k", "many"}}), ConfigError);
  PromptSearchConfig bad;
  bad.beam_size = 0;
  EXPECT_THROW(bad.Validate(), InvalidArgumentError);
}

class ZeroShotPromptTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ToyDatasetSpec spec;
    spec.classes = {"disk", "box", "ring", "plus"};
    spec.n_per_class = 12;
    spec.image_size = 16;
    spec.seed = 5;
    train_ = new Dataset(GenerateToyDataset(spec));
    std::vector<CaptionedImage> pairs;
    for (const auto& ex : train_->examples()) {
      pairs.push_back({ex.image, "a photo of a " + train_->class_names()[ex.label]});
    }
    TrainConfig tc;
    tc.epochs = 10;
    tc.embed_dim = 16;
    encoder_ = TrainDualEncoder(pairs, ArchSpec{ArchKind::kMlp, 4, 16, 16}, tc);
  }
  static void TearDownTestSuite() {
    delete train_;
    encoder_.reset();
  }
  static Dataset* train_;
  static std::shared_ptr<DualEncoder> encoder_;
};
Dataset* ZeroShotPromptTest::train_ = nullptr;
std::shared_ptr<DualEncoder> ZeroShotPromptTest::encoder_;

TEST_F(ZeroShotPromptTest, LossMatchesClassifierCrossEntropy) {
  const ZeroShotPromptObjective obj(encoder_, PromptTemplate::Parse("[T][T] of a [C]"), *train_);
  const auto trig = InitialTriggers(encoder_->tokenizer(), "a photo", 2);
  const auto clf = obj.Classifier({trig});
  double ce = 0;
  for (const auto& ex : train_->examples()) {
    const Vec z = clf->Logits(ex.image);
    const double m = z.maxCoeff();
    ce += std::log((z.array() - m).exp().sum()) + m - z[ex.label];
  }
  ce /= static_cast<double>(train_->size());
  EXPECT_NEAR(obj.Loss(trig, AllOf(train_->size())), ce, 1e-6);
  EXPECT_EQ(obj.Render(trig), "a photo of a {}");
}

TEST_F(ZeroShotPromptTest, SelfReplacementScoreEqualsLoss) {
  const ZeroShotPromptObjective obj(encoder_, PromptTemplate::Parse("[T][T][C]"), *train_);
  const std::vector<int> trig = {2, 3};
  const auto batch = AllOf(train_->size());
  const auto s = ScoreTokenCandidates(obj, trig, 0, batch, obj.vocab_size());
  for (const auto& c : s.candidates) {
    if (c.token == trig[0]) EXPECT_NEAR(c.approx_loss, s.loss, 1e-9);
  }
}

TEST_F(ZeroShotPromptTest, RunPromptSearchProducesLoadablePromptSet) {
  PromptSearchConfig cfg;
  cfg.template_text = "[T][T][C]";
  cfg.init = "a photo";
  cfg.top_k = 4;
  cfg.beam_size = 2;
  cfg.validation_size = 8;
  cfg.ensemble_size = 2;
  cfg.seed = 9;
  const auto out = RunPromptSearch(encoder_, *train_, cfg);
  ASSERT_FALSE(out.prompt_set.sequences.empty());
  EXPECT_EQ(out.prompt_set.encoder_id, encoder_->snapshot_id());
  TempDir dir;
  SavePromptSet(dir / "p.json", out.prompt_set);
  const PromptSet back = LoadPromptSet(dir / "p.json");
  EXPECT_EQ(back.sequences, out.prompt_set.sequences);
  const auto clf = PromptSetClassifier(encoder_, back, train_->class_names());
  EXPECT_EQ(clf->Logits((*train_)[0].image), out.classifier->Logits((*train_)[0].image));
  const auto again = RunPromptSearch(encoder_, *train_, cfg, 3);
  EXPECT_EQ(PromptSetToJson(again.prompt_set), PromptSetToJson(out.prompt_set));
  EXPECT_THROW(InitialTriggers(encoder_->tokenizer(), "one two three", 2), ConfigError);
}

}  // namespace
}  // namespace zsrobust
