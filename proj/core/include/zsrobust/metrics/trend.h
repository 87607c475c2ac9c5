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

#ifndef ZSROBUST_METRICS_TREND_H_
#define ZSROBUST_METRICS_TREND_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/metrics/accuracy.h"

namespace zsrobust {

inline constexpr double kProbitClamp = 1e-4;

// Phi^-1 of the accuracy clamped to [1e-4, 1 - 1e-4].
double Probit(double accuracy);
double InverseProbit(double z);

// beta(a) = Phi(slope * Phi^-1(a) + intercept), fitted by least squares in
// probit space on (acc1, acc2) records of standard models.
struct BaselineTrend {
  double slope = 1;
  double intercept = 0;
  std::string transform = "probit";
  std::vector<std::pair<double, double>> sources;

  double operator()(double acc1) const;
};

nlohmann::json BaselineTrendToJson(const BaselineTrend& trend);

// Needs at least two records with distinct acc1.
BaselineTrend FitBaselineTrend(const std::vector<std::pair<double, double>>& records);

struct RobustnessGaps {
  double effective = 0;             // percentage points
  std::optional<double> relative;   // percentage points, when a comparison is given
};

// effective = acc2(m) - beta(acc1(m)); relative = acc2(m') - acc2(m).
// `other_shift` is m' on the same robustness set.
RobustnessGaps ComputeRobustnessGaps(const EvalRecord& standard, const EvalRecord& shift,
                                     const BaselineTrend& trend,
                                     const EvalRecord* other_shift = nullptr);

// acc2(m') - acc2(m) in whatever unit the inputs use.
double RelativeRobustness(double acc2_other, double acc2_model);

}  // namespace zsrobust

#endif  // ZSROBUST_METRICS_TREND_H_
