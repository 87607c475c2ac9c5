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

#include "zsrobust/metrics/accuracy.h"

#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"

namespace zsrobust {

std::string RecordKindName(RecordKind kind) {
  switch (kind) {
    case RecordKind::kStandard: return "standard";
    case RecordKind::kShift: return "shift";
    case RecordKind::kAttack: return "attack";
  }
  return "unknown";
}

RecordKind ParseRecordKind(const std::string& name) {
  if (name == "standard") return RecordKind::kStandard;
  if (name == "shift") return RecordKind::kShift;
  if (name == "attack") return RecordKind::kAttack;
  throw InvalidArgumentError("unknown record kind '" + name + "'");
}

nlohmann::json EvalRecordToJson(const EvalRecord& r) {
  return {{"model", r.model_id},
          {"dataset", r.dataset_id},
          {"accuracy", r.accuracy},
          {"kind", RecordKindName(r.kind)}};
}

EvalRecord EvalRecordFromJson(const nlohmann::json& j) {
  EvalRecord r;
  r.model_id = j.at("model").get<std::string>();
  r.dataset_id = j.at("dataset").get<std::string>();
  r.accuracy = j.at("accuracy").get<double>();
  r.kind = ParseRecordKind(j.at("kind").get<std::string>());
  if (!(r.accuracy >= 0 && r.accuracy <= 1)) throw FormatError("accuracy outside [0, 1]");
  return r;
}

std::vector<int> PredictAll(const ClassifierModel& model, const Dataset& dataset, int workers) {
  std::vector<int> predictions(dataset.size());
  ParallelFor(dataset.size(), workers,
              [&](std::size_t i) { predictions[i] = Predict(model, dataset[i].image); });
  return predictions;
}

double AccuracyFromPredictions(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw InvalidArgumentError("got " + std::to_string(predictions.size()) + " predictions for " +
                               std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw InvalidArgumentError("accuracy of an empty set is undefined");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

std::vector<int> Labels(const Dataset& dataset) {
  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (const auto& ex : dataset.examples()) labels.push_back(ex.label);
  return labels;
}

EvalRecord EvaluateAccuracy(const ClassifierModel& model, const Dataset& dataset, RecordKind kind,
                            int workers, std::string model_id) {
  if (dataset.empty()) throw InvalidArgumentError("cannot evaluate on an empty dataset");
  EvalRecord r;
  r.model_id = model_id.empty() ? model.snapshot_id() : std::move(model_id);
  r.dataset_id = dataset.Identity();
  r.kind = kind;
  r.accuracy = AccuracyFromPredictions(PredictAll(model, dataset, workers), Labels(dataset));
  return r;
}

double TargetedSuccessRate(const std::vector<int>& predictions, const std::vector<int>& targets) {
  if (predictions.size() != targets.size()) {
    throw InvalidArgumentError("got " + std::to_string(predictions.size()) + " predictions for " +
                               std::to_string(targets.size()) + " targets");
  }
  if (targets.empty()) throw InvalidArgumentError("success rate of an empty set is undefined");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) hits += predictions[i] == targets[i];
  return static_cast<double>(hits) / static_cast<double>(targets.size());
}

}  // namespace zsrobust
