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

#ifndef ZSROBUST_SHIFTGEN_CORRUPTIONS_H_
#define ZSROBUST_SHIFTGEN_CORRUPTIONS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/common/dataset.h"
#include "zsrobust/common/rng.h"

namespace zsrobust {

enum class CorruptionKind {
  kGaussianNoise,
  kShotNoise,
  kImpulseNoise,
  kDefocusBlur,
  kBrightness,
  kContrast,
  kPixelate,
};

std::string CorruptionKindName(CorruptionKind kind);
CorruptionKind ParseCorruptionKind(const std::string& name);
const std::vector<CorruptionKind>& AllCorruptionKinds();

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::kGaussianNoise;
  int severity = 1;  // 1..5

  void Validate() const;
};

// Magnitude knob for a severity; 0 is always the identity.
//   gaussian_noise  sigma        .08 .12 .18 .26 .38
//   shot_noise      1/lambda     lambda = 60 25 12 5 3
//   impulse_noise   amount       .03 .06 .09 .17 .27
//   defocus_blur    disk radius  1 1.5 2 2.5 3
//   brightness      shift        .1 .2 .3 .4 .5
//   contrast        1 - c        c = .4 .3 .2 .1 .05
//   pixelate        block side   2 3 4 5 6
double SeverityMagnitude(CorruptionKind kind, int severity);

// Applies a corruption at an explicit magnitude; the result is clipped to
// [0, 1] but not quantized.
Image ApplyCorruptionMagnitude(const Image& image, CorruptionKind kind, double magnitude,
                               Rng& rng);

Image ApplyCorruption(const Image& image, const CorruptionSpec& spec, std::uint64_t seed);

// Corrupts every image with its own stream (seed, kind, severity, index) and
// quantizes to 8 bits. Labels and targets are kept.
Dataset CorruptDataset(const Dataset& dataset, const CorruptionSpec& spec, std::uint64_t seed,
                       int workers = 1);

nlohmann::json CorruptionGeneratorJson(const CorruptionSpec& spec, std::uint64_t seed,
                                       const std::string& source_identity);

}  // namespace zsrobust

#endif  // ZSROBUST_SHIFTGEN_CORRUPTIONS_H_
