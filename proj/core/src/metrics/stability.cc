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

#include "zsrobust/metrics/stability.h"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"

namespace zsrobust {
namespace {

constexpr int kTopK = 5;

int ClampedRank(const std::vector<int>& ranking, int cls) {
  const int n = std::min<int>(kTopK, static_cast<int>(ranking.size()));
  for (int r = 0; r < n; ++r) {
    if (ranking[static_cast<std::size_t>(r)] == cls) return r + 1;
  }
  return kTopK + 1;
}

void CheckSequences(const std::vector<RankedSequence>& sequences) {
  if (sequences.empty()) throw InvalidArgumentError("no sequences to score");
  for (const auto& s : sequences) {
    if (s.size() < 2) throw InvalidArgumentError("stability needs sequences of length >= 2");
    for (const auto& frame : s) {
      if (frame.empty()) throw InvalidArgumentError("empty class ranking");
    }
  }
}

std::optional<double> MeanOf(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double sum = 0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

FrameComparison ComparisonFor(SequenceKind kind) {
  return IsNoiseSequence(kind) ? FrameComparison::kToFirst : FrameComparison::kConsecutive;
}

double FlipRate(const std::vector<RankedSequence>& sequences, FrameComparison comparison) {
  CheckSequences(sequences);
  double flips = 0;
  double pairs = 0;
  for (const auto& s : sequences) {
    for (std::size_t j = 1; j < s.size(); ++j) {
      const auto& base = comparison == FrameComparison::kToFirst ? s[0] : s[j - 1];
      flips += base[0] != s[j][0] ? 1 : 0;
      pairs += 1;
    }
  }
  return flips / pairs;
}

double Top5Distance(const std::vector<int>& ranking_a, const std::vector<int>& ranking_b) {
  std::set<int> classes;
  for (std::size_t r = 0; r < static_cast<std::size_t>(kTopK); ++r) {
    if (r < ranking_a.size()) classes.insert(ranking_a[r]);
    if (r < ranking_b.size()) classes.insert(ranking_b[r]);
  }
  double d = 0;
  for (int c : classes) d += std::abs(ClampedRank(ranking_a, c) - ClampedRank(ranking_b, c));
  return d;
}

double MeanTop5Distance(const std::vector<RankedSequence>& sequences) {
  CheckSequences(sequences);
  double total = 0;
  double pairs = 0;
  for (const auto& s : sequences) {
    for (std::size_t j = 1; j < s.size(); ++j) {
      total += Top5Distance(s[j - 1], s[j]);
      pairs += 1;
    }
  }
  return total / pairs;
}

StabilityKindScore RawStability(const std::string& kind, FrameComparison comparison,
                                const std::vector<RankedSequence>& sequences) {
  StabilityKindScore s;
  s.kind = kind;
  s.comparison = comparison;
  s.fr_raw = FlipRate(sequences, comparison);
  s.t5d_raw = MeanTop5Distance(sequences);
  return s;
}

StabilityReport NormalizeStability(std::vector<StabilityKindScore> model,
                                   const std::vector<StabilityKindScore>* reference,
                                   std::string reference_id) {
  StabilityReport report;
  report.reference_id = std::move(reference_id);
  if (reference != nullptr) {
    std::vector<double> frs;
    std::vector<double> t5ds;
    for (auto& k : model) {
      const auto it = std::find_if(reference->begin(), reference->end(),
                                   [&](const StabilityKindScore& r) { return r.kind == k.kind; });
      if (it == reference->end()) {
        k.note = "reference has no sequences of this kind";
        continue;
      }
      if (it->fr_raw > 0) {
        k.fr_normalized = 100.0 * (k.fr_raw / it->fr_raw);
        frs.push_back(*k.fr_normalized);
      } else {
        k.note = "reference flip rate is zero";
      }
      if (it->t5d_raw > 0) {
        k.t5d_normalized = 100.0 * (k.t5d_raw / it->t5d_raw);
        t5ds.push_back(*k.t5d_normalized);
      } else {
        k.note += (k.note.empty() ? "" : "; ") + std::string("reference top-5 distance is zero");
      }
    }
    report.mfr = MeanOf(frs);
    report.mt5d = MeanOf(t5ds);
  }
  report.kinds = std::move(model);
  return report;
}

std::vector<RankedSequence> RankSequences(const ClassifierModel& model,
                                          const std::vector<PerturbationSequence>& sequences,
                                          int workers) {
  std::vector<RankedSequence> out(sequences.size());
  ParallelFor(sequences.size(), workers, [&](std::size_t i) {
    for (const auto& frame : sequences[i].frames) {
      out[i].push_back(RankClasses(ForwardLogits(model, frame)));
    }
  });
  return out;
}

StabilityReport SequenceStability(const ClassifierModel& model, const SequenceSet& sequences,
                                  const ClassifierModel* reference, int workers) {
  if (sequences.empty()) throw InvalidArgumentError("no perturbation sequences given");
  std::vector<StabilityKindScore> scores;
  std::vector<StabilityKindScore> ref_scores;
  for (const auto& [kind, seqs] : sequences) {
    const FrameComparison cmp = ComparisonFor(kind);
    const std::string name = SequenceKindName(kind);
    scores.push_back(RawStability(name, cmp, RankSequences(model, seqs, workers)));
    if (reference != nullptr) {
      ref_scores.push_back(RawStability(name, cmp, RankSequences(*reference, seqs, workers)));
    }
  }
  return NormalizeStability(std::move(scores), reference ? &ref_scores : nullptr,
                            reference ? reference->snapshot_id() : std::string());
}

nlohmann::json StabilityReportToJson(const StabilityReport& r) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json();
  };
  nlohmann::json kinds = nlohmann::json::array();
  for (const auto& k : r.kinds) {
    nlohmann::json j = {
        {"kind", k.kind},
        {"comparison", k.comparison == FrameComparison::kToFirst ? "first" : "consecutive"},
        {"fr_raw", k.fr_raw},
        {"t5d_raw", k.t5d_raw},
        {"fr", opt(k.fr_normalized)},
        {"t5d", opt(k.t5d_normalized)}};
    if (!k.note.empty()) j["note"] = k.note;
    kinds.push_back(std::move(j));
  }
  return {{"kinds", kinds}, {"mfr", opt(r.mfr)}, {"mt5d", opt(r.mt5d)},
          {"reference", r.reference_id}};
}

}  // namespace zsrobust
