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

#include <atomic>
#include <fstream>
#include <vector>

#include "fixtures.h"
#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/dataset_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/common/hash.h"
#include "zsrobust/common/parallel.h"
#include "zsrobust/common/rng.h"

namespace zsrobust {
namespace {

using testing::RandomDataset;
using testing::TempDir;

TEST(ImageTest, ValidateRejectsOutOfRange) {
  Image img(2, 2, 0.5);
  EXPECT_NO_THROW(img.Validate());
  img.at(1, 0, 1) = 1.5;
  EXPECT_THROW(img.Validate(), InvalidArgumentError);
  img.at(1, 0, 1) = std::nan("");
  EXPECT_THROW(img.Validate(), InvalidArgumentError);
}

TEST(ImageTest, ChannelMajorIndexing) {
  Image img(2, 3);
  img.at(2, 1, 0) = 0.25;
  // channel 2, row 1, col 0 -> (2 * 2 + 1) * 3 + 0
  EXPECT_EQ(img.data()[15], 0.25);
}

TEST(ImageTest, QuantizeRoundsToNearestLevel) {
  Image img(1, 1, std::vector<double>{0.5, 1.0 / 255 * 0.49, 1.0});
  img.QuantizeTo8Bit();
  EXPECT_DOUBLE_EQ(img.data()[0], 128.0 / 255);
  EXPECT_DOUBLE_EQ(img.data()[1], 0.0);
  EXPECT_DOUBLE_EQ(img.data()[2], 1.0);
}

TEST(ImageTest, LinfDistance) {
  Image a(1, 2, 0.2), b(1, 2, 0.2);
  b.at(1, 0, 1) = 0.7;
  EXPECT_DOUBLE_EQ(LinfDistance(a, b), 0.5);
  EXPECT_THROW(LinfDistance(a, Image(2, 2)), ShapeMismatchError);
}

TEST(DatasetTest, IdentityFollowsContent) {
  Dataset a = RandomDataset(6, 3, 4, 4, 1);
  Dataset b = RandomDataset(6, 3, 4, 4, 1);
  EXPECT_EQ(a.ContentHash(), b.ContentHash());
  EXPECT_EQ(a.Identity(), "random@" + a.ContentHash().substr(0, 16));
  b.mutable_examples()[2].label = 0;
  EXPECT_NE(a.ContentHash(), b.ContentHash());
}

TEST(DatasetTest, SubsetKeepsOrder) {
  Dataset ds = RandomDataset(6, 3, 2, 2, 2);
  Dataset sub = ds.Subset({4, 1}, "sub");
  ASSERT_EQ(sub.size(), 2u);
  EXPECT_EQ(sub[0].image, ds[4].image);
  EXPECT_EQ(sub[1].label, ds[1].label);
  EXPECT_EQ(sub.name(), "sub");
  EXPECT_THROW(ds.Subset({6}, "bad"), InvalidArgumentError);
}

TEST(DatasetTest, ValidateRejectsBadTargets) {
  Dataset ds = RandomDataset(3, 3, 2, 2, 3);
  ds.mutable_examples()[0].target = ds[0].label;
  EXPECT_THROW(ds.Validate(), InvalidArgumentError);
}

TEST(DatasetIoTest, PngRoundTripPreservesHash) {
  TempDir dir;
  Dataset ds = RandomDataset(5, 2, 3, 5, 4);
  ds.mutable_examples()[1].target = 0;
  SaveDataset(dir / "png", ds, {{"kind", "random"}});
  const Dataset back = LoadDataset(dir / "png");
  EXPECT_EQ(back.ContentHash(), ds.ContentHash());
  EXPECT_EQ(back[1].target, std::optional<int>(0));
  const auto manifest = LoadDatasetManifest(dir / "png");
  EXPECT_EQ(manifest["version"], kDatasetManifestVersion);
  EXPECT_EQ(manifest["content_hash"], ds.ContentHash());
  EXPECT_EQ(manifest["generator"]["kind"], "random");
}

TEST(DatasetIoTest, RoztRoundTripPreservesHash) {
  TempDir dir;
  const Dataset ds = RandomDataset(4, 2, 3, 3, 5);
  SaveDataset(dir / "t", ds, {}, DatasetStorage::kRozt);
  EXPECT_EQ(LoadDataset(dir / "t").ContentHash(), ds.ContentHash());
}

// Pixels read from f32 storage are a few ulps off their 8-bit level.
TEST(DatasetIoTest, RoztLoadedDatasetSavesAsPng) {
  TempDir dir;
  const Dataset ds = RandomDataset(6, 2, 4, 4, 6);
  SaveDataset(dir / "t", ds, {}, DatasetStorage::kRozt);
  const Dataset loaded = LoadDataset(dir / "t");
  SaveDataset(dir / "p", loaded, {}, DatasetStorage::kPng);
  EXPECT_EQ(LoadDataset(dir / "p").ContentHash(), ds.ContentHash());
}

TEST(DatasetIoTest, TamperedImageIsDetected) {
  TempDir dir;
  const Dataset ds = RandomDataset(2, 2, 3, 3, 6);
  SaveDataset(dir / "d", ds);
  Image other(3, 3, 0.0);
  WritePng(dir / "d" / "000000.png", other);
  EXPECT_THROW(LoadDataset(dir / "d"), FormatError);
}

TEST(DatasetIoTest, RoztEncoding) {
  RawTensor t{{2, 3}, {0, 1, 2, 3, 4, 5.5f}};
  const std::string bytes = EncodeRozt(t);
  ASSERT_EQ(bytes.substr(0, 4), "ROZT");
  const RawTensor back = DecodeRozt(bytes);
  EXPECT_EQ(back.dims, t.dims);
  EXPECT_EQ(back.data, t.data);
  EXPECT_THROW(DecodeRozt(bytes.substr(0, bytes.size() - 1)), FormatError);
  EXPECT_THROW(DecodeRozt("XXXX" + bytes.substr(4)), FormatError);
}

// Independent decoding of a hand-written record: label byte, then the
// R, G and B planes in raster order.
TEST(DatasetIoTest, Cifar10BinaryIsBitExact) {
  TempDir dir;
  std::vector<unsigned char> bytes;
  for (int rec = 0; rec < 2; ++rec) {
    bytes.push_back(static_cast<unsigned char>(rec == 0 ? 7 : 2));
    for (int i = 0; i < 3072; ++i) bytes.push_back(static_cast<unsigned char>((i * 7 + rec) % 256));
  }
  {
    std::ofstream out(dir / "data_batch_1.bin", std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  const Dataset ds = ReadCifar10Binary(dir / "data_batch_1.bin");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.class_names(), Cifar10ClassNames());
  EXPECT_EQ(ds[0].label, 7);
  EXPECT_EQ(ds[1].label, 2);
  for (int rec = 0; rec < 2; ++rec) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
          const int i = c * 1024 + y * 32 + x;
          ASSERT_EQ(ds[rec].image.at(c, y, x), ((i * 7 + rec) % 256) / 255.0);
        }
      }
    }
  }
  bytes.pop_back();
  {
    std::ofstream out(dir / "short.bin", std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  EXPECT_THROW(ReadCifar10Binary(dir / "short.bin"), FormatError);
}

TEST(HashTest, KnownVector) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(RngTest, StreamsAreIndependentAndStable) {
  EXPECT_EQ(DeriveSeed(1, "a", 0), DeriveSeed(1, "a", 0));
  EXPECT_NE(DeriveSeed(1, "a", 0), DeriveSeed(1, "a", 1));
  EXPECT_NE(DeriveSeed(1, "a", 0), DeriveSeed(1, "b", 0));
  EXPECT_NE(DeriveSeed(1, "a", 0), DeriveSeed(2, "a", 0));
  Rng a = MakeRng(9, "x", 3), b = MakeRng(9, "x", 3);
  EXPECT_EQ(a(), b());
}

TEST(ParallelTest, VisitsEveryIndexOnce) {
  for (int workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(1000);
    ParallelFor(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
  }
}

TEST(ParallelTest, PropagatesExceptions) {
  EXPECT_THROW(ParallelFor(50, 4,
                           [](std::size_t i) {
                             if (i == 17) throw NumericError("boom");
                           }),
               NumericError);
}

TEST(BinaryIoTest, ReaderRejectsTruncation) {
  ByteWriter w;
  w.U32(7);
  w.String("hello");
  const std::string bytes = w.Take();
  ByteReader r(bytes, "test");
  EXPECT_EQ(r.U32(), 7u);
  EXPECT_EQ(r.String(), "hello");
  EXPECT_TRUE(r.AtEnd());
  ByteReader short_reader(std::string_view(bytes).substr(0, 6), "test");
  short_reader.U32();
  EXPECT_THROW(short_reader.String(), FormatError);
}

TEST(ErrorTest, CodeNames) {
  EXPECT_EQ(ErrorCodeName(ErrorCode::kConfig), "config");
  EXPECT_EQ(ErrorCodeName(TransportError(TransportErrorKind::kTimeout, "t").code()), "transport");
}

}  // namespace
}  // namespace zsrobust
