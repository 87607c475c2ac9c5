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

// Published reference figures used as arithmetic checks.

#ifndef ZSROBUST_TESTS_REFERENCE_TABLES_H_
#define ZSROBUST_TESTS_REFERENCE_TABLES_H_

#include <array>

namespace zsrobust::reference {

// Standard ResNet50, top-1 accuracy on each of the 15 ImageNet-C
// corruptions, averaged over severities. Reported average: 39.17.
inline constexpr std::array<double, 15> kResNet50Corruptions = {
    29.29, 27.03, 23.81, 38.75, 26.79, 38.67, 36.24, 32.53,
    38.14, 45.83, 68.02, 39.06, 45.25, 44.79, 53.41};
inline constexpr double kResNet50CorruptionAverage = 39.17;

// ImageNet-R accuracy: CLIP ResNet50 and standard ResNet50.
inline constexpr double kClipResNet50Rendition = 60.51;
inline constexpr double kStandardResNet50Rendition = 35.05;
inline constexpr double kRenditionRelativeRobustness = 25.46;

}  // namespace zsrobust::reference

#endif  // ZSROBUST_TESTS_REFERENCE_TABLES_H_
