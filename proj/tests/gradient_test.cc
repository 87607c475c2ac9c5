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

// Finite-difference checks of every built-in gradient path.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.h"
#include "zsrobust/model/dual_encoder.h"
#include "zsrobust/model/network.h"
#include "zsrobust/model/zero_shot.h"
#include "zsrobust/shiftgen/toy.h"

namespace zsrobust {
namespace {

using testing::RandomImage;

constexpr double kStep = 1e-4;
constexpr double kRelTol = 1e-3;
constexpr double kAbsFloor = 1e-7;

bool Close(double a, double b) {
  return std::abs(a - b) <= kRelTol * std::max(std::abs(a), std::abs(b)) + kAbsFloor;
}

// Central differences of the cross-entropy loss for every pixel.
Vec FiniteDifferenceGradient(const ClassifierModel& model, const Image& img, int label) {
  Vec g(static_cast<Eigen::Index>(img.size()));
  Image probe = img;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double x = img.data()[i];
    probe.mutable_data()[i] = x + kStep;
    const double up = CrossEntropy(model.Logits(probe), label);
    probe.mutable_data()[i] = x - kStep;
    const double down = CrossEntropy(model.Logits(probe), label);
    probe.mutable_data()[i] = x;
    g[static_cast<Eigen::Index>(i)] = (up - down) / (2 * kStep);
  }
  return g;
}

void CheckModel(const ClassifierModel& model, int probes, std::uint64_t seed) {
  const ImageShape shape = model.input_shape();
  std::mt19937_64 rng(seed);
  for (int p = 0; p < probes; ++p) {
    const Image img = RandomImage(shape.height, shape.width, rng);
    const int label = static_cast<int>(rng() % static_cast<unsigned>(model.num_classes()));
    const Vec analytic = InputGradient(model, img, label, LossDirection::kMaximize);
    const Vec numeric = FiniteDifferenceGradient(model, img, label);
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
      ASSERT_TRUE(Close(analytic[i], numeric[i]))
          << "probe " << p << " element " << i << ": " << analytic[i] << " vs " << numeric[i];
    }
  }
}

Dataset Toy(int n, int size, std::uint64_t seed) {
  ToyDatasetSpec spec;
  spec.classes = {"disk", "box", "ring"};
  spec.n_per_class = n;
  spec.image_size = size;
  spec.seed = seed;
  return GenerateToyDataset(spec);
}

TEST(InputGradientTest, LinearModel) {
  CheckModel(*testing::RandomLinearModel(4, 4, 4, 1), 100, 1);
}

TEST(InputGradientTest, MlpModel) {
  TrainConfig tc;
  tc.epochs = 3;
  const auto model = TrainClassifier(Toy(6, 8, 2), ArchSpec{ArchKind::kMlp, 4, 16, 16}, tc);
  CheckModel(*model, 100, 2);
}

TEST(InputGradientTest, FlatMlpModel) {
  TrainConfig tc;
  tc.epochs = 2;
  const auto model = TrainClassifier(Toy(6, 8, 3), ArchSpec{ArchKind::kMlp, 0, 16, 16}, tc);
  CheckModel(*model, 100, 3);
}

TEST(InputGradientTest, ZeroShotClassifier) {
  const Dataset ds = Toy(6, 8, 4);
  std::vector<CaptionedImage> pairs;
  for (const auto& ex : ds.examples()) pairs.push_back({ex.image, ds.class_names()[ex.label]});
  TrainConfig tc;
  tc.epochs = 3;
  const auto enc = TrainDualEncoder(pairs, ArchSpec{ArchKind::kMlp, 4, 16, 16}, tc);
  const auto clf = SynthesizeZeroShotClassifier(
      enc, ds.class_names(), ExpandPromptTemplates({"a photo of a {}"}, ds.class_names()));
  CheckModel(*clf, 100, 4);
}

TEST(InputGradientTest, LogitVjpMatchesFiniteDifferences) {
  TrainConfig tc;
  tc.epochs = 2;
  const auto model = TrainClassifier(Toy(4, 8, 5), ArchSpec{ArchKind::kMlp, 4, 8, 8}, tc);
  std::mt19937_64 rng(5);
  for (int p = 0; p < 10; ++p) {
    const Image img = RandomImage(8, 8, rng);
    Vec cot = Vec::Random(model->num_classes());
    const Vec analytic = model->LogitVjp(img, cot);
    Image probe = img;
    for (std::size_t i = 0; i < img.size(); ++i) {
      probe.mutable_data()[i] = img.data()[i] + kStep;
      const double up = cot.dot(model->Logits(probe));
      probe.mutable_data()[i] = img.data()[i] - kStep;
      const double down = cot.dot(model->Logits(probe));
      probe.mutable_data()[i] = img.data()[i];
      ASSERT_TRUE(Close(analytic[static_cast<Eigen::Index>(i)], (up - down) / (2 * kStep)));
    }
  }
}

// Contrastive loss gradient with respect to every parameter tensor.
TEST(ParameterGradientTest, DualEncoderContrastiveLoss) {
  const Dataset ds = Toy(3, 8, 6);
  std::vector<CaptionedImage> pairs;
  for (const auto& ex : ds.examples()) {
    pairs.push_back({ex.image, "a photo of a " + ds.class_names()[ex.label]});
  }
  TrainConfig tc;
  tc.epochs = 2;
  const auto enc = TrainDualEncoder(pairs, ArchSpec{ArchKind::kMlp, 4, 8, 8}, tc);
  std::vector<const Image*> images;
  std::vector<std::vector<int>> bags;
  for (const auto& p : pairs) {
    images.push_back(&p.image);
    bags.push_back(enc->tokenizer().Encode(p.caption));
  }
  ParameterSet grads;
  enc->BatchLossWith(enc->params(), images, bags, &grads);
  ParameterSet probe = enc->params();
  std::mt19937_64 rng(6);
  int checked = 0;
  for (const auto& name : probe.names()) {
    Mat& values = probe.Get(name);
    const Mat& g = grads.Get(name);
    ASSERT_EQ(g.rows(), values.rows());
    ASSERT_EQ(g.cols(), values.cols());
    // Up to 25 entries per tensor, always including the first.
    for (int k = 0; k < 25 && k < values.size(); ++k) {
      const Eigen::Index i = k == 0 ? 0 : static_cast<Eigen::Index>(rng() % values.size());
      const double x = values.data()[i];
      values.data()[i] = x + kStep;
      const double up = enc->BatchLossWith(probe, images, bags);
      values.data()[i] = x - kStep;
      const double down = enc->BatchLossWith(probe, images, bags);
      values.data()[i] = x;
      ASSERT_TRUE(Close(g.data()[i], (up - down) / (2 * kStep)))
          << name << "[" << i << "]: " << g.data()[i] << " vs " << (up - down) / (2 * kStep);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

}  // namespace
}  // namespace zsrobust
