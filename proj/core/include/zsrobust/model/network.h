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

#ifndef ZSROBUST_MODEL_NETWORK_H_
#define ZSROBUST_MODEL_NETWORK_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/common/dataset.h"
#include "zsrobust/common/rng.h"
#include "zsrobust/model/classifier.h"
#include "zsrobust/model/parameters.h"

namespace zsrobust {

enum class ArchKind { kLinear, kMlp };

std::string ArchKindName(ArchKind kind);
ArchKind ParseArchKind(const std::string& name);

// Reference trunk. kLinear is a single affine map. kMlp embeds p x p
// patches with a shared affine + ReLU, mean-pools the patch features, then
// applies affine + ReLU + affine. patch == 0 treats the whole image as one
// patch, which is a plain two-hidden-layer MLP.
struct ArchSpec {
  ArchKind kind = ArchKind::kMlp;
  int patch = 4;
  int patch_hidden = 32;
  int hidden = 64;

  bool operator==(const ArchSpec&) const = default;
};

nlohmann::json ArchSpecToJson(const ArchSpec& spec);
ArchSpec ArchSpecFromJson(const nlohmann::json& j);

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 5e-3;
  std::uint64_t seed = 0;
  // Initial logit scale of the dual encoder (multiplies cosine similarity).
  double temperature_init = 10.0;
  // Joint embedding dimension of the dual encoder.
  int embed_dim = 32;

  void Validate() const;
};

nlohmann::json TrainConfigToJson(const TrainConfig& config);
TrainConfig TrainConfigFromJson(const nlohmann::json& j);

// Rows of the returned matrix are the channel-major pixel vectors.
Mat ImagesToRows(const std::vector<const Image*>& images);
Mat ImageToRow(const Image& image);

ParameterSet InitTrunk(const ArchSpec& arch, const ImageShape& shape, int out_dim,
                       const std::string& prefix, Rng& rng);
Tape::Var TrunkForward(Tape& tape, ParameterBinder& binder, const std::string& prefix,
                       const ArchSpec& arch, const ImageShape& shape, Tape::Var images);

// Classifier built from the reference trunk with exact input gradients.
class NetworkClassifier final : public ClassifierModel {
 public:
  NetworkClassifier(ArchSpec arch, ImageShape shape, std::vector<std::string> class_names,
                    ParameterSet params);

  // Linear model from per-class weight rows (C x D) and biases.
  static std::shared_ptr<NetworkClassifier> FromLinearWeights(
      const ImageShape& shape, const Mat& class_weights, const Vec& bias,
      std::vector<std::string> class_names = {});

  int num_classes() const override { return static_cast<int>(class_names_.size()); }
  ImageShape input_shape() const override { return shape_; }
  std::vector<std::string> class_names() const override { return class_names_; }
  Vec Logits(const Image& image) const override;
  bool has_input_gradient() const override { return true; }
  bool has_logit_vjp() const override { return true; }
  Vec LogitVjp(const Image& image, const Vec& cotangent) const override;
  Vec LossGradient(const Image& image, int label, LossDirection direction) const override;
  std::string snapshot_id() const override { return snapshot_id_; }

  // Logits for a batch of images, one row per image.
  Mat BatchLogits(const std::vector<const Image*>& images) const;

  const ArchSpec& arch() const { return arch_; }
  const ParameterSet& params() const { return params_; }

 private:
  ArchSpec arch_;
  ImageShape shape_;
  std::vector<std::string> class_names_;
  ParameterSet params_;
  std::string snapshot_id_;
};

// Seeded initialization followed by `config.epochs` epochs of mini-batch Adam
// on the cross-entropy loss. Parameters are rounded to float at the end so
// the returned model is exactly what a snapshot stores. Throws NumericError
// on a non-finite loss.
std::shared_ptr<NetworkClassifier> TrainClassifier(const Dataset& dataset, const ArchSpec& arch,
                                                   const TrainConfig& config);

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_NETWORK_H_
