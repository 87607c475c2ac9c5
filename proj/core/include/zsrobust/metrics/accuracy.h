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

#ifndef ZSROBUST_METRICS_ACCURACY_H_
#define ZSROBUST_METRICS_ACCURACY_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/common/dataset.h"
#include "zsrobust/model/classifier.h"

namespace zsrobust {

enum class RecordKind { kStandard, kShift, kAttack };

std::string RecordKindName(RecordKind kind);
RecordKind ParseRecordKind(const std::string& name);

struct EvalRecord {
  std::string model_id;
  std::string dataset_id;
  double accuracy = 0;  // in [0, 1]
  RecordKind kind = RecordKind::kStandard;
};

nlohmann::json EvalRecordToJson(const EvalRecord& record);
EvalRecord EvalRecordFromJson(const nlohmann::json& j);

// Argmax predictions, computed on up to `workers` threads.
std::vector<int> PredictAll(const ClassifierModel& model, const Dataset& dataset, int workers = 1);

// Fraction of positions where predictions[i] == labels[i].
double AccuracyFromPredictions(const std::vector<int>& predictions, const std::vector<int>& labels);

std::vector<int> Labels(const Dataset& dataset);

EvalRecord EvaluateAccuracy(const ClassifierModel& model, const Dataset& dataset,
                            RecordKind kind = RecordKind::kStandard, int workers = 1,
                            std::string model_id = {});

// Fraction of predictions equal to the attack targets.
double TargetedSuccessRate(const std::vector<int>& predictions, const std::vector<int>& targets);

}  // namespace zsrobust

#endif  // ZSROBUST_METRICS_ACCURACY_H_
