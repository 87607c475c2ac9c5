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

#ifndef ZSROBUST_METRICS_SUMMARY_H_
#define ZSROBUST_METRICS_SUMMARY_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/attacks/attack.h"

namespace zsrobust {

// Even counts take the mean of the middle pair.
double Median(std::vector<double> values);
double Mean(const std::vector<double>& values);

struct AttackSummary {
  std::size_t count = 0;
  // Minimum perturbation runs only; unfound samples enter at epsilon_max.
  std::optional<double> median_min_linf;
  std::size_t unfound_count = 0;
  double robust_accuracy = 0;  // fraction still classified correctly
  double success_rate = 0;
  std::size_t flagged_count = 0;
};

nlohmann::json AttackSummaryToJson(const AttackSummary& summary);

AttackSummary SummarizeAttackOutcomes(const std::vector<AttackOutcome>& outcomes,
                                      AttackMode mode);

// One row per corruption, one accuracy per severity (exactly five).
using CorruptionGrid = std::vector<std::pair<std::string, std::vector<double>>>;

inline constexpr std::size_t kSeverityLevels = 5;

struct CorruptionSummary {
  std::vector<std::pair<std::string, double>> per_corruption;
  double overall = 0;
};

CorruptionSummary SummarizeCorruptions(const CorruptionGrid& grid);

}  // namespace zsrobust

#endif  // ZSROBUST_METRICS_SUMMARY_H_
