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

#ifndef ZSROBUST_SHIFTGEN_SEQUENCES_H_
#define ZSROBUST_SHIFTGEN_SEQUENCES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "zsrobust/common/dataset.h"
#include "zsrobust/common/rng.h"

namespace zsrobust {

enum class SequenceKind {
  kGaussianNoise,
  kShotNoise,
  kTranslate,
  kRotate,
  kScale,
  kBrightness,
  kTilt,  // shear approximation of a perspective tilt
};

std::string SequenceKindName(SequenceKind kind);
SequenceKind ParseSequenceKind(const std::string& name);
const std::vector<SequenceKind>& AllSequenceKinds();

// Noise kinds perturb every frame independently and are compared against
// frame 1; geometric kinds start from the clean frame and grow the
// transform by one step per frame, compared frame to frame.
bool IsNoiseSequence(SequenceKind kind);

struct PerturbationSequence {
  SequenceKind kind = SequenceKind::kTranslate;
  std::size_t source_index = 0;
  int label = 0;
  std::vector<Image> frames;
};

// Per-frame step sizes of the geometric kinds and noise levels.
inline constexpr double kSequenceNoiseSigma = 0.05;
inline constexpr double kSequenceShotLambda = 30.0;
inline constexpr double kRotateDegreesPerFrame = 2.0;
inline constexpr double kScalePerFrame = 0.03;
inline constexpr double kBrightnessPerFrame = 0.03;
inline constexpr double kShearPerFrame = 0.03;

// Frame j (1-based) of a geometric kind at step j - 1. Nearest-neighbour
// inverse mapping, black outside the source.
Image GeometricFrame(const Image& clean, SequenceKind kind, int step);

// Length 1 yields the clean frame only, for every kind.
PerturbationSequence BuildSequence(const Image& clean, SequenceKind kind, int length, Rng& rng);

// One sequence per example; the stream of example i is (seed, kind, i).
std::vector<PerturbationSequence> BuildPerturbationSequences(const Dataset& dataset,
                                                             SequenceKind kind, int length,
                                                             std::uint64_t seed, int workers = 1);

}  // namespace zsrobust

#endif  // ZSROBUST_SHIFTGEN_SEQUENCES_H_
