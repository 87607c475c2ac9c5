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

#include "zsrobust/model/network.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zsrobust/common/error.h"
#include "zsrobust/model/snapshot.h"

namespace zsrobust {
namespace {

Mat RandomNormal(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

int PatchSide(const ArchSpec& arch, const ImageShape& shape) {
  if (arch.patch == 0) return 0;
  if (shape.height % arch.patch != 0 || shape.width % arch.patch != 0) {
    throw InvalidArgumentError("patch size " + std::to_string(arch.patch) +
                               " does not tile input " + shape.ToString());
  }
  return arch.patch;
}

}  // namespace

std::string ArchKindName(ArchKind kind) { return kind == ArchKind::kLinear ? "linear" : "mlp"; }

ArchKind ParseArchKind(const std::string& name) {
  if (name == "linear") return ArchKind::kLinear;
  if (name == "mlp") return ArchKind::kMlp;
  throw InvalidArgumentError("unknown architecture '" + name + "' (expected linear|mlp)");
}

nlohmann::json ArchSpecToJson(const ArchSpec& spec) {
  return {{"kind", ArchKindName(spec.kind)},
          {"patch", spec.patch},
          {"patch_hidden", spec.patch_hidden},
          {"hidden", spec.hidden}};
}

ArchSpec ArchSpecFromJson(const nlohmann::json& j) {
  ArchSpec spec;
  spec.kind = ParseArchKind(j.value("kind", std::string("mlp")));
  spec.patch = j.value("patch", spec.patch);
  spec.patch_hidden = j.value("patch_hidden", spec.patch_hidden);
  spec.hidden = j.value("hidden", spec.hidden);
  return spec;
}

void TrainConfig::Validate() const {
  if (epochs < 0) throw InvalidArgumentError("epochs must be non-negative");
  if (batch_size <= 0) throw InvalidArgumentError("batch_size must be positive");
  if (!(learning_rate > 0)) throw InvalidArgumentError("learning_rate must be positive");
  if (!(temperature_init > 0)) throw InvalidArgumentError("temperature_init must be positive");
  if (embed_dim <= 0) throw InvalidArgumentError("embed_dim must be positive");
}

nlohmann::json TrainConfigToJson(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed},
          {"temperature_init", c.temperature_init},
          {"embed_dim", c.embed_dim}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.seed = j.value("seed", c.seed);
  c.temperature_init = j.value("temperature_init", c.temperature_init);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  return c;
}

Mat ImagesToRows(const std::vector<const Image*>& images) {
  if (images.empty()) return Mat(0, 0);
  const auto d = static_cast<Eigen::Index>(images.front()->size());
  Mat rows(static_cast<Eigen::Index>(images.size()), d);
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (static_cast<Eigen::Index>(images[i]->size()) != d) {
      throw ShapeMismatchError("batch mixes image sizes");
    }
    rows.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(images[i]->data().data(), d);
  }
  return rows;
}

Mat ImageToRow(const Image& image) { return ImagesToRows({&image}); }

ParameterSet InitTrunk(const ArchSpec& arch, const ImageShape& shape, int out_dim,
                       const std::string& prefix, Rng& rng) {
  ParameterSet p;
  const auto in_dim = static_cast<Eigen::Index>(shape.size());
  if (arch.kind == ArchKind::kLinear) {
    p.Add(prefix + "linear.weight", RandomNormal(in_dim, out_dim, 1.0 / std::sqrt(in_dim), rng));
    p.Add(prefix + "linear.bias", Mat::Zero(1, out_dim));
    return p;
  }
  if (arch.patch_hidden <= 0 || arch.hidden <= 0) {
    throw InvalidArgumentError("mlp widths must be positive");
  }
  const int side = PatchSide(arch, shape);
  const Eigen::Index patch_dim =
      side == 0 ? in_dim : static_cast<Eigen::Index>(shape.channels) * side * side;
  p.Add(prefix + "patch.weight",
        RandomNormal(patch_dim, arch.patch_hidden, std::sqrt(2.0 / patch_dim), rng));
  p.Add(prefix + "patch.bias", Mat::Zero(1, arch.patch_hidden));
  p.Add(prefix + "hidden.weight",
        RandomNormal(arch.patch_hidden, arch.hidden, std::sqrt(2.0 / arch.patch_hidden), rng));
  p.Add(prefix + "hidden.bias", Mat::Zero(1, arch.hidden));
  p.Add(prefix + "out.weight",
        RandomNormal(arch.hidden, out_dim, std::sqrt(1.0 / arch.hidden), rng));
  p.Add(prefix + "out.bias", Mat::Zero(1, out_dim));
  return p;
}

Tape::Var TrunkForward(Tape& tape, ParameterBinder& binder, const std::string& prefix,
                       const ArchSpec& arch, const ImageShape& shape, Tape::Var images) {
  if (arch.kind == ArchKind::kLinear) {
    return tape.AddRow(tape.MatMul(images, binder.Bind(prefix + "linear.weight")),
                       binder.Bind(prefix + "linear.bias"));
  }
  const int side = PatchSide(arch, shape);
  Tape::Var features;
  if (side == 0) {
    features = tape.Relu(tape.AddRow(tape.MatMul(images, binder.Bind(prefix + "patch.weight")),
                                     binder.Bind(prefix + "patch.bias")));
  } else {
    const int per_image = (shape.height / side) * (shape.width / side);
    Tape::Var patches = tape.Patchify(images, shape.height, shape.width, side);
    Tape::Var embedded =
        tape.Relu(tape.AddRow(tape.MatMul(patches, binder.Bind(prefix + "patch.weight")),
                              binder.Bind(prefix + "patch.bias")));
    features = tape.GroupMeanRows(embedded, per_image);
  }
  Tape::Var hidden =
      tape.Relu(tape.AddRow(tape.MatMul(features, binder.Bind(prefix + "hidden.weight")),
                            binder.Bind(prefix + "hidden.bias")));
  return tape.AddRow(tape.MatMul(hidden, binder.Bind(prefix + "out.weight")),
                     binder.Bind(prefix + "out.bias"));
}

NetworkClassifier::NetworkClassifier(ArchSpec arch, ImageShape shape,
                                     std::vector<std::string> class_names, ParameterSet params)
    : arch_(arch), shape_(shape), class_names_(std::move(class_names)), params_(std::move(params)) {
  if (class_names_.empty()) throw InvalidArgumentError("classifier needs at least one class");
  snapshot_id_ = SnapshotId(ClassifierToSnapshot(*this));
}

std::shared_ptr<NetworkClassifier> NetworkClassifier::FromLinearWeights(
    const ImageShape& shape, const Mat& class_weights, const Vec& bias,
    std::vector<std::string> class_names) {
  if (class_weights.cols() != static_cast<Eigen::Index>(shape.size()) ||
      bias.size() != class_weights.rows()) {
    throw ShapeMismatchError("linear weights do not match input " + shape.ToString());
  }
  if (class_names.empty()) {
    for (Eigen::Index c = 0; c < class_weights.rows(); ++c) {
      class_names.push_back("class" + std::to_string(c));
    }
  }
  ParameterSet p;
  p.Add("linear.weight", class_weights.transpose());
  p.Add("linear.bias", bias.transpose());
  ArchSpec arch;
  arch.kind = ArchKind::kLinear;
  return std::make_shared<NetworkClassifier>(arch, shape, std::move(class_names), std::move(p));
}

Mat NetworkClassifier::BatchLogits(const std::vector<const Image*>& images) const {
  Tape tape;
  ParameterBinder binder(tape, params_, false);
  Tape::Var x = tape.Constant(ImagesToRows(images));
  return tape.value(TrunkForward(tape, binder, "", arch_, shape_, x));
}

Vec NetworkClassifier::Logits(const Image& image) const {
  return BatchLogits({&image}).row(0).transpose();
}

Vec NetworkClassifier::LogitVjp(const Image& image, const Vec& cotangent) const {
  Tape tape;
  ParameterBinder binder(tape, params_, false);
  Tape::Var x = tape.Leaf(ImageToRow(image));
  Tape::Var logits = TrunkForward(tape, binder, "", arch_, shape_, x);
  tape.Backward(tape.WeightedSum(logits, cotangent.transpose()));
  return tape.grad(x).row(0).transpose();
}

Vec NetworkClassifier::LossGradient(const Image& image, int label,
                                    LossDirection direction) const {
  Tape tape;
  ParameterBinder binder(tape, params_, false);
  Tape::Var x = tape.Leaf(ImageToRow(image));
  Tape::Var logits = TrunkForward(tape, binder, "", arch_, shape_, x);
  tape.Backward(tape.SoftmaxCrossEntropy(logits, {label}));
  Vec g = tape.grad(x).row(0).transpose();
  if (direction == LossDirection::kMinimize) g = -g;
  return g;
}

std::shared_ptr<NetworkClassifier> TrainClassifier(const Dataset& dataset, const ArchSpec& arch,
                                                   const TrainConfig& config) {
  config.Validate();
  if (dataset.empty()) throw InvalidArgumentError("cannot train on an empty dataset");
  dataset.Validate();
  const ImageShape shape = dataset.input_shape();
  const int classes = dataset.num_classes();

  Rng init_rng = MakeRng(config.seed, "classifier-init");
  ParameterSet params = InitTrunk(arch, shape, classes, "", init_rng);
  AdamOptimizer optimizer(config.learning_rate);

  std::vector<std::size_t> order(dataset.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = MakeRng(config.seed, "classifier-shuffle", static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<const Image*> images;
      std::vector<int> labels;
      for (std::size_t k = start; k < end; ++k) {
        images.push_back(&dataset[order[k]].image);
        labels.push_back(dataset[order[k]].label);
      }
      Tape tape;
      ParameterBinder binder(tape, params, true);
      Tape::Var x = tape.Constant(ImagesToRows(images));
      Tape::Var logits = TrunkForward(tape, binder, "", arch, shape, x);
      Tape::Var loss = tape.SoftmaxCrossEntropy(logits, std::move(labels));
      const double value = tape.value(loss)(0, 0);
      if (!std::isfinite(value)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", batch starting at " + std::to_string(start));
      }
      tape.Backward(loss);
      optimizer.Step(params, binder.Gradients());
    }
  }
  params.RoundToFloat();
  return std::make_shared<NetworkClassifier>(arch, shape, dataset.class_names(),
                                             std::move(params));
}

}  // namespace zsrobust
