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

#ifndef ZSROBUST_METRICS_STABILITY_H_
#define ZSROBUST_METRICS_STABILITY_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/model/classifier.h"
#include "zsrobust/shiftgen/sequences.h"

namespace zsrobust {

enum class FrameComparison { kToFirst, kConsecutive };

// Noise kinds compare every frame to the first; geometric kinds compare
// consecutive frames.
FrameComparison ComparisonFor(SequenceKind kind);

// Per-frame class rankings (best first) of one sequence.
using RankedSequence = std::vector<std::vector<int>>;

// Mean over all compared frame pairs of 1[top-1 changes].
double FlipRate(const std::vector<RankedSequence>& sequences, FrameComparison comparison);

// Sum over the union of both top-5 sets of |min(rank_a, 6) - min(rank_b, 6)|,
// ranks 1-based.
double Top5Distance(const std::vector<int>& ranking_a, const std::vector<int>& ranking_b);

// Mean Top5Distance over consecutive frame pairs.
double MeanTop5Distance(const std::vector<RankedSequence>& sequences);

struct StabilityKindScore {
  std::string kind;
  FrameComparison comparison = FrameComparison::kConsecutive;
  double fr_raw = 0;
  double t5d_raw = 0;
  // 100 * raw / reference raw; empty without a reference or when the
  // reference raw value is zero.
  std::optional<double> fr_normalized;
  std::optional<double> t5d_normalized;
  std::string note;
};

struct StabilityReport {
  std::vector<StabilityKindScore> kinds;
  std::optional<double> mfr;   // mean of the valid normalized FR values
  std::optional<double> mt5d;  // mean of the valid normalized T5D values
  std::string reference_id;
};

nlohmann::json StabilityReportToJson(const StabilityReport& report);

StabilityKindScore RawStability(const std::string& kind, FrameComparison comparison,
                                const std::vector<RankedSequence>& sequences);

// Fills the normalized fields of `model` against `reference` (matched by
// kind name) and the means. Kinds with a zero reference are noted and left
// out of the means.
StabilityReport NormalizeStability(std::vector<StabilityKindScore> model,
                                   const std::vector<StabilityKindScore>* reference,
                                   std::string reference_id = {});

std::vector<RankedSequence> RankSequences(const ClassifierModel& model,
                                          const std::vector<PerturbationSequence>& sequences,
                                          int workers = 1);

using SequenceSet = std::map<SequenceKind, std::vector<PerturbationSequence>>;

StabilityReport SequenceStability(const ClassifierModel& model, const SequenceSet& sequences,
                                  const ClassifierModel* reference = nullptr, int workers = 1);

}  // namespace zsrobust

#endif  // ZSROBUST_METRICS_STABILITY_H_
