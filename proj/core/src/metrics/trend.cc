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

#include "zsrobust/metrics/trend.h"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "zsrobust/common/error.h"

namespace zsrobust {
namespace {

const boost::math::normal_distribution<double> kStandardNormal(0.0, 1.0);

}  // namespace

double Probit(double accuracy) {
  if (!std::isfinite(accuracy)) throw NumericError("probit of a non-finite accuracy");
  return boost::math::quantile(kStandardNormal,
                               std::clamp(accuracy, kProbitClamp, 1.0 - kProbitClamp));
}

double InverseProbit(double z) { return boost::math::cdf(kStandardNormal, z); }

double BaselineTrend::operator()(double acc1) const {
  return InverseProbit(slope * Probit(acc1) + intercept);
}

nlohmann::json BaselineTrendToJson(const BaselineTrend& t) {
  nlohmann::json sources = nlohmann::json::array();
  for (const auto& [a1, a2] : t.sources) sources.push_back({a1, a2});
  return {{"transform", t.transform},
          {"slope", t.slope},
          {"intercept", t.intercept},
          {"sources", sources}};
}

BaselineTrend FitBaselineTrend(const std::vector<std::pair<double, double>>& records) {
  if (records.size() < 2) throw InvalidArgumentError("trend fit needs at least two records");
  double mx = 0, my = 0;
  for (const auto& [a1, a2] : records) {
    if (!(a1 >= 0 && a1 <= 1 && a2 >= 0 && a2 <= 1)) {
      throw InvalidArgumentError("trend records must be accuracies in [0, 1]");
    }
    mx += Probit(a1);
    my += Probit(a2);
  }
  const auto n = static_cast<double>(records.size());
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& [a1, a2] : records) {
    const double dx = Probit(a1) - mx;
    sxx += dx * dx;
    sxy += dx * (Probit(a2) - my);
  }
  if (!(sxx > 0)) {
    throw InvalidArgumentError("degenerate trend fit: every record has the same acc1");
  }
  BaselineTrend t;
  t.slope = sxy / sxx;
  t.intercept = my - t.slope * mx;
  t.sources = records;
  return t;
}

double RelativeRobustness(double acc2_other, double acc2_model) { return acc2_other - acc2_model; }

RobustnessGaps ComputeRobustnessGaps(const EvalRecord& standard, const EvalRecord& shift,
                                     const BaselineTrend& trend, const EvalRecord* other_shift) {
  if (standard.model_id != shift.model_id) {
    throw InvalidArgumentError("standard and shift records describe different models");
  }
  RobustnessGaps gaps;
  gaps.effective = 100.0 * (shift.accuracy - trend(standard.accuracy));
  if (other_shift != nullptr) {
    if (other_shift->dataset_id != shift.dataset_id) {
      throw InvalidArgumentError("relative robustness needs the same robustness set, got '" +
                                 other_shift->dataset_id + "' and '" + shift.dataset_id + "'");
    }
    gaps.relative = 100.0 * RelativeRobustness(other_shift->accuracy, shift.accuracy);
  }
  return gaps;
}

}  // namespace zsrobust
