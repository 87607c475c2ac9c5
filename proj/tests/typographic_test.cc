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

#include <algorithm>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "fixtures.h"
#include "zsrobust/common/error.h"
#include "zsrobust/metrics/accuracy.h"
#include "zsrobust/shiftgen/font.h"
#include "zsrobust/shiftgen/typographic.h"

namespace zsrobust {
namespace {

using testing::RandomDataset;

Dataset Source(int n = 12, int size = 32) {
  Dataset ds = RandomDataset(n, 4, size, size, 17);
  return Dataset("src", {"disk", "box", "ring", "plus"}, ds.examples());
}

TEST(TypographicTest, SameSeedIsBitIdentical) {
  const Dataset src = Source();
  TypographicSpec spec;
  spec.seed = 3;
  const auto a = GenerateTypographicDataset(src, spec, 1);
  const auto b = GenerateTypographicDataset(src, spec, 4);
  EXPECT_EQ(a.dataset.ContentHash(), b.dataset.ContentHash());
  EXPECT_EQ(a.generator, b.generator);
  spec.seed = 4;
  EXPECT_NE(GenerateTypographicDataset(src, spec).dataset.ContentHash(), a.dataset.ContentHash());
}

TEST(TypographicTest, ZeroCoordinatesLeavesPixelsUntouched) {
  const Dataset src = Source();
  TypographicSpec spec;
  spec.k_coords = 0;
  const auto r = GenerateTypographicDataset(src, spec);
  for (std::size_t i = 0; i < src.size(); ++i) {
    EXPECT_EQ(r.dataset[i].image, src[i].image);
    ASSERT_TRUE(r.dataset[i].target.has_value());
    EXPECT_NE(*r.dataset[i].target, src[i].label);
  }
}

TEST(TypographicTest, PixelsOutsideTextBoxesAreUnchanged) {
  const Dataset src = Source(8, 48);
  TypographicSpec spec;
  spec.k_coords = kCifarStyleCoords;
  spec.seed = 9;
  const auto r = GenerateTypographicDataset(src, spec);
  const ImageShape shape = src.input_shape();
  std::size_t inside_changed = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::string text = src.class_names()[*r.dataset[i].target];
    std::vector<TextBox> boxes;
    for (const TextPoint& p : r.coordinates) boxes.push_back(LayoutText(shape, text, p, r.font_scale).box);
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < shape.height; ++y) {
        for (int x = 0; x < shape.width; ++x) {
          const bool inside = std::any_of(boxes.begin(), boxes.end(),
                                          [&](const TextBox& b) { return b.Contains(x, y); });
          const double before = src[i].image.at(c, y, x), after = r.dataset[i].image.at(c, y, x);
          if (!inside) {
            ASSERT_EQ(before, after);
          } else {
            inside_changed += before != after;
            ASSERT_TRUE(after == 0.0 || after == 1.0);
          }
        }
      }
    }
  }
  EXPECT_GT(inside_changed, 0u);
}

TEST(TypographicTest, TargetsAreUniformOverOtherClasses) {
  const int classes = 10, draws = 10000, label = 3;
  Rng rng = MakeRng(123, "chi-square");
  std::vector<int> counts(classes, 0);
  for (int i = 0; i < draws; ++i) {
    const int t = SampleTarget(label, classes, rng);
    ASSERT_NE(t, label);
    ++counts[t];
  }
  const double expected = static_cast<double>(draws) / (classes - 1);
  double chi2 = 0;
  for (int c = 0; c < classes; ++c) {
    if (c == label) continue;
    chi2 += (counts[c] - expected) * (counts[c] - expected) / expected;
  }
  const boost::math::chi_squared dist(classes - 2);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.01);
}

TEST(TypographicTest, OracleThatReadsTheTargetSucceedsEverywhere) {
  const Dataset src = Source();
  const auto r = GenerateTypographicDataset(src, {});
  std::vector<int> predictions, targets;
  for (const auto& ex : r.dataset.examples()) {
    predictions.push_back(*ex.target);
    targets.push_back(*ex.target);
  }
  EXPECT_EQ(TargetedSuccessRate(predictions, targets), 1.0);
  std::vector<int> labels = Labels(r.dataset);
  EXPECT_EQ(TargetedSuccessRate(labels, targets), 0.0);
}

TEST(TypographicTest, CoordinateCountsAndWindow) {
  EXPECT_EQ(kImageNetStyleCoords, 8);
  EXPECT_EQ(kCifarStyleCoords, 4);
  Rng rng(1);
  const ImageShape shape{64, 96, 3};
  const auto pts = SampleCoordinates(shape, 50, 1, rng);
  ASSERT_EQ(pts.size(), 50u);
  for (const auto& p : pts) {
    EXPECT_LE(p.x + kCoordinateWindowChars * kGlyphSize, shape.width);
    EXPECT_LE(p.y + kGlyphSize, shape.height);
    EXPECT_GE(p.x, 0);
    EXPECT_GE(p.y, 0);
  }
}

TEST(TypographicTest, LongTextIsTruncatedAndFlagged) {
  const ImageShape shape{16, 16, 3};
  const auto layout = LayoutText(shape, "television", {0, 0}, 1);
  EXPECT_TRUE(layout.truncated);
  EXPECT_EQ(layout.text, "te");
  EXPECT_EQ(layout.box.width, 16);

  Dataset src = RandomDataset(4, 2, 16, 16, 1);
  src = Dataset("s", {"television", "refrigerator"}, src.examples());
  TypographicSpec spec;
  spec.k_coords = 1;
  spec.font_scale = 1;
  const auto r = GenerateTypographicDataset(src, spec);
  EXPECT_EQ(r.generator["truncated"].size(), 4u);
}

TEST(TypographicTest, ExplicitCoordinatesAreUsedVerbatim) {
  const Dataset src = Source();
  TypographicSpec spec;
  spec.k_coords = 2;
  spec.coordinates = std::vector<TextPoint>{{1, 2}, {3, 4}};
  const auto r = GenerateTypographicDataset(src, spec);
  EXPECT_EQ(r.coordinates, *spec.coordinates);
  spec.k_coords = 3;
  EXPECT_THROW(GenerateTypographicDataset(src, spec), InvalidArgumentError);
}

TEST(TypographicTest, RejectsDegenerateInputs) {
  Rng rng(1);
  EXPECT_THROW(SampleTarget(0, 1, rng), InvalidArgumentError);
  EXPECT_THROW(SampleTarget(2, 2, rng), InvalidArgumentError);
  EXPECT_THROW(SampleCoordinates({8, 8, 3}, -1, 1, rng), InvalidArgumentError);
  EXPECT_THROW(GenerateTypographicDataset(Dataset("e", {"a", "b"}), {}), InvalidArgumentError);
}

TEST(FontTest, GlyphsAreDistinctAndSpaceIsBlank) {
  for (int r = 0; r < kGlyphSize; ++r) EXPECT_EQ(GlyphRow(' ', r), 0);
  auto bits = [](char c) {
    std::string s;
    for (int r = 0; r < kGlyphSize; ++r) s.push_back(static_cast<char>(GlyphRow(c, r)));
    return s;
  };
  std::set<std::string> seen;
  for (char c = 'a'; c <= 'z'; ++c) seen.insert(bits(c));
  EXPECT_EQ(seen.size(), 26u);
}

}  // namespace
}  // namespace zsrobust
