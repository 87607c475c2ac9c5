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

#include "zsrobust/attacks/evaluate.h"

#include <fstream>

#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"

namespace zsrobust {

AttackEvaluation EvaluateUnderAttack(const ClassifierModel& target, const Dataset& dataset,
                                     const AttackConfig& config, int workers,
                                     const ClassifierModel* substitute) {
  config.Validate();
  if (dataset.empty()) throw InvalidArgumentError("cannot attack an empty dataset");
  AttackEvaluation eval;
  eval.config = config;
  eval.access = ResolveAccess(config, substitute);
  eval.outcomes.resize(dataset.size());
  ParallelFor(dataset.size(), workers, [&](std::size_t i) {
    eval.outcomes[i] = RunAttack(target, dataset[i], config, i, substitute);
  });
  eval.summary = SummarizeAttackOutcomes(eval.outcomes, config.mode);
  return eval;
}

nlohmann::json OutcomeJsonLine(std::size_t index, const AttackConfig& config,
                               const AttackOutcome& outcome) {
  nlohmann::json j = {
      {"index", index},
      {"method", AttackMethodName(config.method)},
      {"mode", AttackModeName(config.mode)},
      {"epsilon", config.mode == AttackMode::kBudgeted ? config.epsilon : outcome.min_distance},
      {"success", outcome.success},
      {"linf", outcome.linf_distance},
      {"queries", outcome.queries},
      {"total_queries", outcome.total_queries},
      {"clean_prediction", outcome.clean_prediction},
      {"adversarial_prediction", outcome.adversarial_prediction},
      {"flagged", outcome.flagged}};
  if (config.mode == AttackMode::kMinPerturbation) j["found_min"] = outcome.found_min;
  if (outcome.flagged) j["flag_reason"] = outcome.flag_reason;
  return j;
}

void WriteOutcomeJsonLines(const std::string& path, const AttackEvaluation& evaluation) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < evaluation.outcomes.size(); ++i) {
    out << OutcomeJsonLine(i, evaluation.config, evaluation.outcomes[i]).dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace zsrobust
