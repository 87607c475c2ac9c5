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

#ifndef ZSROBUST_ATTACKS_EVALUATE_H_
#define ZSROBUST_ATTACKS_EVALUATE_H_

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/attacks/attack.h"
#include "zsrobust/metrics/summary.h"

namespace zsrobust {

struct AttackEvaluation {
  AttackConfig config;
  AttackAccess access = AttackAccess::kWhiteBox;
  std::vector<AttackOutcome> outcomes;
  AttackSummary summary;
};

// Attacks every example; sample i draws from rng index i, so results do not
// depend on the worker count.
AttackEvaluation EvaluateUnderAttack(const ClassifierModel& target, const Dataset& dataset,
                                     const AttackConfig& config, int workers = 1,
                                     const ClassifierModel* substitute = nullptr);

// One JSON-lines record per attacked sample.
nlohmann::json OutcomeJsonLine(std::size_t index, const AttackConfig& config,
                               const AttackOutcome& outcome);

void WriteOutcomeJsonLines(const std::string& path, const AttackEvaluation& evaluation);

}  // namespace zsrobust

#endif  // ZSROBUST_ATTACKS_EVALUATE_H_
