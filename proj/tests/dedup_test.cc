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

#include <random>
#include <set>

#include "fixtures.h"
#include "zsrobust/common/error.h"
#include "zsrobust/dedup/dedup.h"
#include "zsrobust/metrics/accuracy.h"

namespace zsrobust {
namespace {

using testing::TempDir;

// Row-normalized f32 vectors, as an index stores them.
EmbeddingIndex MakeIndex(Mat m, std::string encoder = "enc", std::string dataset = "ds") {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m.row(i).normalize();
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<float>(m(i, j));
  }
  return {std::move(encoder), std::move(dataset), std::move(m)};
}

Mat Gaussian(int rows, int cols, std::mt19937_64& g) {
  std::normal_distribution<double> n(0, 1);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(g);
  return m;
}

// Flattened pixels plus a constant, normalized.
class PixelEmbedder final : public ImageEmbedder {
 public:
  explicit PixelEmbedder(ImageShape shape, std::string id = "pixels") : shape_(shape), id_(std::move(id)) {}
  int embed_dim() const override { return static_cast<int>(shape_.size()) + 1; }
  ImageShape input_shape() const override { return shape_; }
  Vec EmbedImage(const Image& image) const override {
    Vec v(embed_dim());
    for (std::size_t i = 0; i < image.size(); ++i) v[static_cast<Eigen::Index>(i)] = image.data()[i] - 0.5;
    v[embed_dim() - 1] = 0.1;
    return v.normalized();
  }
  std::string snapshot_id() const override { return id_; }

 private:
  ImageShape shape_;
  std::string id_;
};

TEST(DedupTest, PrefilterMatchesBruteForce) {
  std::mt19937_64 g(1);
  // Correlated rows so that a useful fraction of pairs is near the thresholds.
  Mat base = Gaussian(1, 16, g);
  Mat train = Gaussian(200, 16, g) * 0.6 + base.replicate(200, 1);
  Mat test = Gaussian(200, 16, g) * 0.6 + base.replicate(200, 1);
  const auto tr = MakeIndex(train), te = MakeIndex(test);
  for (double t : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    std::vector<std::size_t> want;
    for (std::size_t i = 0; i < te.rows(); ++i) {
      double best = -2;
      for (std::size_t j = 0; j < tr.rows(); ++j) best = std::max(best, Cosine(te, i, tr, j));
      if (best >= t) want.push_back(i);
    }
    for (auto strategy : {ScanStrategy::kExhaustive, ScanStrategy::kProjectionPrefilter}) {
      const auto got = DetectOverlaps(te, tr, t, strategy, 3);
      std::vector<std::size_t> ids;
      for (const auto& m : got) ids.push_back(m.test_index);
      EXPECT_EQ(ids, want) << "threshold " << t;
    }
  }
}

TEST(DedupTest, FlagsAreMonotoneInThreshold) {
  std::mt19937_64 g(2);
  const auto tr = MakeIndex(Gaussian(50, 8, g)), te = MakeIndex(Gaussian(60, 8, g));
  std::size_t prev = te.rows() + 1;
  for (double t = -1.0; t <= 1.0; t += 0.05) {
    const std::size_t n = DetectOverlaps(te, tr, t).size();
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(DedupTest, RecoversPlantedDuplicates) {
  std::mt19937_64 g(3);
  std::normal_distribution<double> tiny(0, 1e-4);
  const Mat train = Gaussian(200, 32, g);
  Mat test = Gaussian(100, 32, g);
  std::set<std::size_t> planted;
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = static_cast<std::size_t>(k * 5);
    planted.insert(i);
    test.row(static_cast<Eigen::Index>(i)) = train.row(7 * k);
    for (Eigen::Index j = 0; j < 32; ++j) test(static_cast<Eigen::Index>(i), j) += tiny(g);
  }
  const auto tr = MakeIndex(train), te = MakeIndex(test);
  const auto found = DetectOverlaps(te, tr, 0.999, ScanStrategy::kProjectionPrefilter);
  std::set<std::size_t> ids;
  for (const auto& m : found) {
    ids.insert(m.test_index);
    EXPECT_EQ(m.train_index, 7 * (m.test_index / 5));
  }
  EXPECT_EQ(ids, planted);
  EXPECT_DOUBLE_EQ(static_cast<double>(ids.size()) / te.rows(), 0.20);
}

TEST(DedupTest, ThresholdAboveOneFlagsNothing) {
  std::mt19937_64 g(4);
  const auto tr = MakeIndex(Gaussian(10, 4, g));
  EXPECT_TRUE(DetectOverlaps(tr, tr, 1.01).empty());
  EXPECT_EQ(DetectOverlaps(tr, tr, 0.999).size(), 10u);
}

TEST(DedupTest, CosineIsSymmetric) {
  std::mt19937_64 g(5);
  const auto a = MakeIndex(Gaussian(10, 6, g)), b = MakeIndex(Gaussian(10, 6, g));
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 10; ++j) EXPECT_DOUBLE_EQ(Cosine(a, i, b, j), Cosine(b, j, a, i));
  }
}

TEST(DedupTest, MismatchedEncodersAreRejected) {
  std::mt19937_64 g(6);
  const auto a = MakeIndex(Gaussian(3, 4, g), "enc-a"), b = MakeIndex(Gaussian(3, 4, g), "enc-b");
  EXPECT_THROW(DetectOverlaps(a, b, 0.9), InvalidArgumentError);
  const auto c = MakeIndex(Gaussian(3, 5, g), "enc-a");
  EXPECT_THROW(DetectOverlaps(a, c, 0.9), ShapeMismatchError);
}

TEST(DedupTest, IndexRoundTripsThroughFile) {
  const Dataset ds = testing::RandomDataset(12, 2, 4, 4, 7);
  const PixelEmbedder enc(ds.input_shape());
  const auto idx = BuildEmbeddingIndex(enc, ds, 3);
  EXPECT_EQ(idx, BuildEmbeddingIndex(enc, ds, 1));
  EXPECT_EQ(idx.encoder_id, "pixels");
  EXPECT_EQ(idx.dataset_id, ds.Identity());
  TempDir dir;
  SaveEmbeddingIndex(dir / "i.roze", idx);
  EXPECT_EQ(LoadEmbeddingIndex(dir / "i.roze"), idx);
  std::string bytes = SerializeEmbeddingIndex(idx);
  EXPECT_EQ(bytes.substr(0, 4), "ROZE");
  EXPECT_THROW(DeserializeEmbeddingIndex(bytes.substr(0, bytes.size() - 1)), FormatError);
  bytes[0] = 'X';
  EXPECT_THROW(DeserializeEmbeddingIndex(bytes), FormatError);
}

TEST(DedupTest, SweepReportCountsAndNaMarker) {
  Dataset train = testing::RandomDataset(20, 2, 4, 4, 8);
  Dataset test = train.Subset({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, "test");
  const Dataset fresh = testing::RandomDataset(10, 2, 4, 4, 9);
  for (const auto& ex : fresh.examples()) test.Add(ex);
  const PixelEmbedder enc(train.input_shape());
  const auto tr = BuildEmbeddingIndex(enc, train), te = BuildEmbeddingIndex(enc, test);
  const auto model = testing::RandomLinearModel(2, 4, 4, 10);
  const auto reports = OverlapSweepReport(*model, test, te, tr, {0.999, 1.01}, 1);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].overlapped.size(), 10u);
  EXPECT_DOUBLE_EQ(reports[0].overlap_fraction, 0.5);
  EXPECT_EQ(reports[0].cleaned_count, 10u);
  EXPECT_TRUE(reports[1].overlapped.empty());
  EXPECT_DOUBLE_EQ(*reports[1].accuracy_cleaned, reports[1].accuracy_full);

  // Hand recount of the cleaned accuracy.
  const auto preds = PredictAll(*model, test);
  int correct = 0;
  for (std::size_t i = 10; i < 20; ++i) correct += preds[i] == test[i].label;
  EXPECT_DOUBLE_EQ(*reports[0].accuracy_cleaned, correct / 10.0);

  const auto all = OverlapSweepReport(*model, train, tr, tr, {0.999});
  EXPECT_FALSE(all[0].accuracy_cleaned.has_value());
  const std::string csv = OverlapReportsToCsv(all);
  EXPECT_NE(csv.find(",NA\n"), std::string::npos);
  EXPECT_EQ(csv.rfind("threshold,overlap_pct,acc_full,acc_clean\n", 0), 0u);
  EXPECT_TRUE(OverlapReportsToJson(all)[0]["accuracy_cleaned"].is_null());
}

TEST(DedupTest, SweepRejectsBadInputs) {
  const Dataset ds = testing::RandomDataset(6, 2, 4, 4, 11);
  const PixelEmbedder enc(ds.input_shape());
  const auto idx = BuildEmbeddingIndex(enc, ds);
  const auto model = testing::RandomLinearModel(2, 4, 4, 12);
  EXPECT_THROW(OverlapSweepReport(*model, ds, idx, idx, {}), InvalidArgumentError);
  EXPECT_THROW(OverlapSweepReport(*model, ds, idx, idx, {0.9, 0.8}), InvalidArgumentError);
  const Dataset other = testing::RandomDataset(6, 2, 4, 4, 13);
  EXPECT_THROW(OverlapSweepReport(*model, other, idx, idx, {0.9}), InvalidArgumentError);
  EXPECT_EQ(DefaultOverlapThresholds().size(), 5u);
}

TEST(DedupTest, NonUnitRowsAreRejected) {
  EmbeddingIndex idx{"e", "d", Mat::Constant(2, 3, 1.0)};
  EXPECT_THROW(idx.Validate(), NumericError);
}

}  // namespace
}  // namespace zsrobust
