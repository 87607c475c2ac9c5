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

#include "zsrobust/metrics/summary.h"

#include <algorithm>
#include <numeric>

#include "zsrobust/common/error.h"

namespace zsrobust {

double Median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgumentError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double Mean(const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgumentError("mean of an empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

nlohmann::json AttackSummaryToJson(const AttackSummary& s) {
  nlohmann::json j = {{"count", s.count},
                      {"unfound_count", s.unfound_count},
                      {"robust_accuracy", s.robust_accuracy},
                      {"success_rate", s.success_rate},
                      {"flagged_count", s.flagged_count}};
  j["median_min_linf"] = s.median_min_linf ? nlohmann::json(*s.median_min_linf) : nlohmann::json();
  return j;
}

AttackSummary SummarizeAttackOutcomes(const std::vector<AttackOutcome>& outcomes,
                                      AttackMode mode) {
  if (outcomes.empty()) throw InvalidArgumentError("no attack outcomes to summarize");
  AttackSummary s;
  s.count = outcomes.size();
  std::size_t successes = 0;
  std::vector<double> distances;
  for (const auto& o : outcomes) {
    successes += o.success;
    s.flagged_count += o.flagged;
    if (mode == AttackMode::kMinPerturbation) {
      distances.push_back(o.min_distance);
      s.unfound_count += !o.found_min;
    }
  }
  s.success_rate = static_cast<double>(successes) / static_cast<double>(s.count);
  s.robust_accuracy = 1.0 - s.success_rate;
  if (mode == AttackMode::kMinPerturbation) s.median_min_linf = Median(std::move(distances));
  return s;
}

CorruptionSummary SummarizeCorruptions(const CorruptionGrid& grid) {
  if (grid.empty()) throw InvalidArgumentError("empty corruption grid");
  CorruptionSummary out;
  double total = 0;
  for (const auto& [name, severities] : grid) {
    if (severities.size() != kSeverityLevels) {
      throw InvalidArgumentError("corruption '" + name + "' has " +
                                 std::to_string(severities.size()) + " severities, expected 5");
    }
    const double mean = Mean(severities);
    out.per_corruption.emplace_back(name, mean);
    total += mean;
  }
  out.overall = total / static_cast<double>(grid.size());
  return out;
}

}  // namespace zsrobust
