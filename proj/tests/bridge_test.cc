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

// Bridge protocol conformance, driven against an out-of-process peer.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.h"
#include "zsrobust/attacks/attack.h"
#include "zsrobust/common/error.h"
#include "zsrobust/model/bridge.h"
#include "zsrobust/model/dual_encoder.h"
#include "zsrobust/model/snapshot.h"
#include "zsrobust/shiftgen/toy.h"

namespace zsrobust {
namespace {

using testing::RandomImage;
using testing::TempDir;

const std::string kPeer = ZSROBUST_TEST_PEER;

std::string PeerCommand(const std::string& args) { return "'" + kPeer + "' " + args; }

Dataset Toy(std::uint64_t seed) {
  ToyDatasetSpec spec;
  spec.classes = {"disk", "box", "ring"};
  spec.n_per_class = 6;
  spec.image_size = 8;
  spec.seed = seed;
  return GenerateToyDataset(spec);
}

TEST(TensorCodecTest, RoundTripIsBitExactForF32Values) {
  std::vector<double> values = {0.0, -1.5, 0.25, 1e-3f, 3.0e10f};
  for (double& v : values) v = static_cast<float>(v);
  const auto back = DecodeTensorBase64(EncodeTensorBase64(values.data(), values.size()));
  EXPECT_EQ(back, values);
  EXPECT_THROW(DecodeTensorBase64("abc"), TransportError);
}

TEST(BridgeInfoTest, ParsesOptionalFields) {
  nlohmann::json data = {{"protocol_version", 1},
                         {"classes", {"x", "y"}},
                         {"has_input_gradient", true},
                         {"has_embeddings", true},
                         {"input", {{"h", 4}, {"w", 5}, {"c", 3}}},
                         {"embed_dim", 7}};
  const BridgeInfo info = ParseBridgeInfo(data);
  EXPECT_EQ(info.classes.size(), 2u);
  EXPECT_EQ(info.input, (ImageShape{4, 5, 3}));
  EXPECT_EQ(info.embed_dim, 7);
  EXPECT_DOUBLE_EQ(info.logit_scale, 100.0);
  data.erase("embed_dim");
  EXPECT_THROW(ParseBridgeInfo(data), TransportError);
  data["embed_dim"] = 7;
  data.erase("input");
  EXPECT_THROW(ParseBridgeInfo(data), TransportError);
}

TEST(BridgeTest, EchoPeerRoundTrip) {
  const ExternalModel ext = ConnectExternalModel(PeerCommand("echo"));
  EXPECT_EQ(ext.info.protocol_version, kBridgeProtocolVersion);
  ASSERT_TRUE(ext.classifier);
  EXPECT_FALSE(ext.encoder);
  EXPECT_EQ(ext.classifier->num_classes(), 3);
  EXPECT_FALSE(ext.classifier->has_input_gradient());
  const Vec logits = ForwardLogits(*ext.classifier, Image(2, 2, 0.5));
  ASSERT_EQ(logits.size(), 3);
  EXPECT_EQ(logits[0], static_cast<double>(0.1f));
  EXPECT_EQ(logits[1], static_cast<double>(0.2f));
  EXPECT_EQ(logits[2], static_cast<double>(0.7f));
}

TEST(BridgeTest, MissingGradientIsAnUnsupportedCapability) {
  const ExternalModel ext = ConnectExternalModel(PeerCommand("echo"));
  EXPECT_THROW(InputGradient(*ext.classifier, Image(2, 2, 0.5), 0, LossDirection::kMaximize),
               UnsupportedCapabilityError);
  AttackConfig cfg;
  const LabeledExample ex{Image(2, 2, 0.5), 2, std::nullopt};
  EXPECT_THROW(RunWhiteBoxAttack(*ext.classifier, ex, cfg), UnsupportedCapabilityError);
  // Black-box methods only need logits.
  cfg.method = AttackMethod::kNes;
  cfg.samples = 4;
  cfg.steps = 2;
  EXPECT_NO_THROW(RunAttack(*ext.classifier, ex, cfg, 0));
}

TEST(BridgeTest, MalformedFrameAndUnsupportedMethodCodes) {
  auto transport = SpawnSubprocessTransport(PeerCommand("echo"));
  transport->SendLine("{not json");
  auto reply = nlohmann::json::parse(transport->ReceiveLine(5000));
  EXPECT_FALSE(reply["ok"].get<bool>());
  EXPECT_EQ(reply["code"], "bad_frame");
  // The peer keeps serving after a bad frame.
  BridgeClient client(std::move(transport), BridgeOptions{});
  EXPECT_EQ(client.info().classes.size(), 3u);
  try {
    client.Call("embed_text", {{"text", "hello"}});
    FAIL() << "expected a remote error";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.kind(), TransportErrorKind::kRemote);
    EXPECT_EQ(e.remote_code(), "unsupported");
  }
  EXPECT_NO_THROW(client.Call("info"));
}

TEST(BridgeTest, VersionMismatchIsTyped) {
  try {
    ConnectExternalModel(PeerCommand("version2"));
    FAIL() << "expected a version mismatch";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.kind(), TransportErrorKind::kVersionMismatch);
  }
}

TEST(BridgeTest, SilentPeerTimesOut) {
  BridgeOptions opts;
  opts.timeout_ms = 200;
  try {
    ConnectExternalModel(PeerCommand("silent"), opts);
    FAIL() << "expected a timeout";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.kind(), TransportErrorKind::kTimeout);
  }
}

TEST(BridgeTest, ExitedPeerIsReportedAsClosed) {
  try {
    ConnectExternalModel("true");
    FAIL() << "expected a transport error";
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.kind() == TransportErrorKind::kClosed ||
                e.kind() == TransportErrorKind::kHandshake);
  }
}

TEST(BridgeTest, ToyMlpParityWithNative) {
  TempDir dir;
  const Dataset ds = Toy(1);
  TrainConfig tc;
  tc.epochs = 3;
  const auto native = TrainClassifier(ds, ArchSpec{ArchKind::kMlp, 4, 16, 16}, tc);
  SaveSnapshot(dir / "mlp.rozm", ClassifierToSnapshot(*native));
  const ExternalModel ext = ConnectExternalModel(PeerCommand("mlp '" + (dir / "mlp.rozm").string() + "'"));
  ASSERT_TRUE(ext.classifier);
  EXPECT_TRUE(ext.classifier->has_input_gradient());
  EXPECT_EQ(ext.classifier->class_names(), native->class_names());
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Image img = RandomImage(8, 8, rng);
    const Vec a = ForwardLogits(*native, img);
    const Vec b = ForwardLogits(*ext.classifier, img);
    ASSERT_LE((a - b).cwiseAbs().maxCoeff(), 1e-5);
    for (auto dir_ : {LossDirection::kMaximize, LossDirection::kMinimize}) {
      const Vec ga = InputGradient(*native, img, i % 3, dir_);
      const Vec gb = InputGradient(*ext.classifier, img, i % 3, dir_);
      ASSERT_LE((ga - gb).cwiseAbs().maxCoeff(), 1e-5);
    }
  }
}

TEST(BridgeTest, EncoderPeerServesEmbeddings) {
  TempDir dir;
  const Dataset ds = Toy(2);
  std::vector<CaptionedImage> pairs;
  for (const auto& ex : ds.examples()) pairs.push_back({ex.image, ds.class_names()[ex.label]});
  TrainConfig tc;
  tc.epochs = 2;
  const auto native = TrainDualEncoder(pairs, ArchSpec{ArchKind::kMlp, 4, 8, 8}, tc);
  SaveSnapshot(dir / "enc.rozm", DualEncoderToSnapshot(*native));
  const ExternalModel ext =
      ConnectExternalModel(PeerCommand("encoder '" + (dir / "enc.rozm").string() + "'"));
  ASSERT_TRUE(ext.encoder);
  EXPECT_FALSE(ext.classifier);
  EXPECT_EQ(ext.encoder->embed_dim(), native->embed_dim());
  EXPECT_LE((ext.encoder->EmbedImage(ds[0].image) - native->EmbedImage(ds[0].image))
                .cwiseAbs()
                .maxCoeff(),
            1e-5);
  EXPECT_LE((ext.encoder->EmbedText("circle") - native->EmbedText("circle")).cwiseAbs().maxCoeff(),
            1e-5);
  EXPECT_NEAR(ext.encoder->EmbedText("square").norm(), 1.0, 1e-6);
}

}  // namespace
}  // namespace zsrobust
