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

#include <set>

#include "fixtures.h"
#include "zsrobust/common/error.h"
#include "zsrobust/shiftgen/corruptions.h"
#include "zsrobust/shiftgen/sequences.h"
#include "zsrobust/shiftgen/toy.h"

namespace zsrobust {
namespace {

using testing::RandomDataset;
using testing::RandomImage;

double MeanAbsDiff(const Image& a, const Image& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.data()[i] - b.data()[i]);
  return s / static_cast<double>(a.size());
}

TEST(CorruptionTest, ZeroMagnitudeIsIdentity) {
  std::mt19937_64 g(1);
  Image img = RandomImage(8, 8, g);
  img.QuantizeTo8Bit();
  for (CorruptionKind k : AllCorruptionKinds()) {
    if (k == CorruptionKind::kShotNoise) continue;  // magnitude is 1/lambda there
    Rng rng(2);
    const Image out = ApplyCorruptionMagnitude(img, k, 0.0, rng);
    EXPECT_LE(MeanAbsDiff(out, img), 1e-12) << CorruptionKindName(k);
  }
}

TEST(CorruptionTest, GaussianSeverityIsMonotoneOnAverage) {
  const Dataset ds = RandomDataset(100, 2, 8, 8, 3);
  double d1 = 0, d5 = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    d1 += MeanAbsDiff(ApplyCorruption(ds[i].image, {CorruptionKind::kGaussianNoise, 1}, i), ds[i].image);
    d5 += MeanAbsDiff(ApplyCorruption(ds[i].image, {CorruptionKind::kGaussianNoise, 5}, i), ds[i].image);
  }
  EXPECT_GT(d5, d1);
}

TEST(CorruptionTest, SeverityMagnitudesIncrease) {
  for (CorruptionKind k : AllCorruptionKinds()) {
    for (int s = 1; s < 5; ++s) {
      const double a = SeverityMagnitude(k, s), b = SeverityMagnitude(k, s + 1);
      if (k == CorruptionKind::kShotNoise || k == CorruptionKind::kContrast ||
          k == CorruptionKind::kPixelate) {
        EXPECT_NE(a, b) << CorruptionKindName(k);
      } else {
        EXPECT_LT(a, b) << CorruptionKindName(k);
      }
    }
  }
}

TEST(CorruptionTest, OutputsStayInUnitRangeAndAreDeterministic) {
  const Dataset ds = RandomDataset(6, 2, 12, 12, 4);
  for (CorruptionKind k : AllCorruptionKinds()) {
    for (int s = 1; s <= 5; ++s) {
      const Dataset a = CorruptDataset(ds, {k, s}, 9, 1);
      const Dataset b = CorruptDataset(ds, {k, s}, 9, 4);
      EXPECT_EQ(a.ContentHash(), b.ContentHash());
      EXPECT_NO_THROW(a.Validate());
    }
  }
}

TEST(CorruptionTest, RejectsUnknownKindAndSeverity) {
  EXPECT_THROW(ParseCorruptionKind("fog"), InvalidArgumentError);
  EXPECT_THROW((CorruptionSpec{CorruptionKind::kBrightness, 0}.Validate()), InvalidArgumentError);
  EXPECT_THROW((CorruptionSpec{CorruptionKind::kBrightness, 6}.Validate()), InvalidArgumentError);
  for (CorruptionKind k : AllCorruptionKinds()) EXPECT_EQ(ParseCorruptionKind(CorruptionKindName(k)), k);
}

TEST(SequenceTest, LengthOneIsTheCleanFrame) {
  std::mt19937_64 g(5);
  const Image img = RandomImage(8, 8, g);
  for (SequenceKind k : AllSequenceKinds()) {
    Rng rng(1);
    const auto seq = BuildSequence(img, k, 1, rng);
    ASSERT_EQ(seq.frames.size(), 1u);
    EXPECT_EQ(seq.frames[0], img);
  }
  Rng rng(1);
  EXPECT_THROW(BuildSequence(img, SequenceKind::kTranslate, 0, rng), InvalidArgumentError);
}

TEST(SequenceTest, TranslateShiftsByOnePixelPerFrameWithBlackFill) {
  std::mt19937_64 g(6);
  Image img = RandomImage(10, 10, g);
  img.QuantizeTo8Bit();
  Rng rng(1);
  const auto seq = BuildSequence(img, SequenceKind::kTranslate, 5, rng);
  ASSERT_EQ(seq.frames.size(), 5u);
  EXPECT_EQ(seq.frames[0], img);
  for (int j = 1; j < 5; ++j) {
    const Image& f = seq.frames[j];
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 10; ++x) {
          const double want = x - j >= 0 ? img.at(c, y, x - j) : 0.0;
          EXPECT_NEAR(f.at(c, y, x), want, 1e-9) << j << " " << c << " " << y << " " << x;
        }
      }
    }
  }
}

TEST(SequenceTest, NoiseFramesDifferFromClean) {
  std::mt19937_64 g(7);
  Image img = RandomImage(8, 8, g);
  img.QuantizeTo8Bit();
  for (SequenceKind k : {SequenceKind::kGaussianNoise, SequenceKind::kShotNoise}) {
    Rng rng(3);
    const auto seq = BuildSequence(img, k, 6, rng);
    ASSERT_EQ(seq.frames.size(), 6u);
    std::set<std::vector<double>> distinct;
    for (const Image& f : seq.frames) {
      EXPECT_NE(f, img);
      EXPECT_NO_THROW(f.Validate());
      distinct.insert(f.data());
    }
    EXPECT_EQ(distinct.size(), 6u);
  }
}

TEST(SequenceTest, GeometricFramesStayValid) {
  const Dataset ds = RandomDataset(4, 2, 12, 12, 8);
  for (SequenceKind k : AllSequenceKinds()) {
    const auto a = BuildPerturbationSequences(ds, k, 4, 11, 1);
    const auto b = BuildPerturbationSequences(ds, k, 4, 11, 3);
    ASSERT_EQ(a.size(), ds.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].label, ds[i].label);
      EXPECT_EQ(a[i].frames, b[i].frames);
      for (const Image& f : a[i].frames) EXPECT_NO_THROW(f.Validate());
    }
  }
}

TEST(ToyTest, SameSeedSameHash) {
  ToyDatasetSpec spec;
  spec.n_per_class = 4;
  spec.image_size = 16;
  spec.seed = 21;
  const Dataset a = GenerateToyDataset(spec, 1);
  const Dataset b = GenerateToyDataset(spec, 4);
  EXPECT_EQ(a.ContentHash(), b.ContentHash());
  EXPECT_EQ(a.size(), 4 * ToyClassNames().size());
  spec.seed = 22;
  EXPECT_NE(GenerateToyDataset(spec).ContentHash(), a.ContentHash());
}

TEST(ToyTest, ShiftsChangeTheImages) {
  ToyDatasetSpec spec;
  spec.n_per_class = 2;
  spec.image_size = 16;
  const std::string plain = GenerateToyDataset(spec).ContentHash();
  for (ToyShift s : {ToyShift::kBackground, ToyShift::kTexture}) {
    spec.shift = s;
    EXPECT_NE(GenerateToyDataset(spec).ContentHash(), plain) << ToyShiftName(s);
    EXPECT_EQ(ParseToyShift(ToyShiftName(s)), s);
  }
}

TEST(ToyTest, RejectsBadSpecs) {
  ToyDatasetSpec spec;
  spec.image_size = kMinToyImageSize - 1;
  EXPECT_THROW(GenerateToyDataset(spec), InvalidArgumentError);
  spec = {};
  spec.classes = {"disk", "blob"};
  EXPECT_THROW(GenerateToyDataset(spec), InvalidArgumentError);
  spec = {};
  spec.classes = {"disk"};
  EXPECT_THROW(GenerateToyDataset(spec), InvalidArgumentError);
  EXPECT_THROW(ParseToyShift("sepia"), InvalidArgumentError);
}

}  // namespace
}  // namespace zsrobust
