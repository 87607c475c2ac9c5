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

#include "zsrobust/shiftgen/sequences.h"

#include <cmath>
#include <numbers>

#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"
#include "zsrobust/shiftgen/corruptions.h"

namespace zsrobust {
namespace {

// Samples the source at the pre-image of every output pixel.
template <typename InverseMap>
Image Warp(const Image& in, InverseMap inverse) {
  Image out(in.height(), in.width(), 0.0);
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      const auto [sx, sy] = inverse(static_cast<double>(x), static_cast<double>(y));
      const long ix = std::lround(sx);
      const long iy = std::lround(sy);
      if (ix < 0 || iy < 0 || ix >= in.width() || iy >= in.height()) continue;
      for (int c = 0; c < kImageChannels; ++c) {
        out.at(c, y, x) = in.at(c, static_cast<int>(iy), static_cast<int>(ix));
      }
    }
  }
  return out;
}

}  // namespace

std::string SequenceKindName(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::kGaussianNoise: return "gaussian_noise";
    case SequenceKind::kShotNoise: return "shot_noise";
    case SequenceKind::kTranslate: return "translate";
    case SequenceKind::kRotate: return "rotate";
    case SequenceKind::kScale: return "scale";
    case SequenceKind::kBrightness: return "brightness";
    case SequenceKind::kTilt: return "tilt";
  }
  return "unknown";
}

const std::vector<SequenceKind>& AllSequenceKinds() {
  static const std::vector<SequenceKind> kAll = {
      SequenceKind::kGaussianNoise, SequenceKind::kShotNoise,  SequenceKind::kTranslate,
      SequenceKind::kRotate,        SequenceKind::kScale,      SequenceKind::kBrightness,
      SequenceKind::kTilt};
  return kAll;
}

SequenceKind ParseSequenceKind(const std::string& name) {
  for (SequenceKind k : AllSequenceKinds()) {
    if (SequenceKindName(k) == name) return k;
  }
  if (name == "tilt-approx") return SequenceKind::kTilt;
  throw InvalidArgumentError("unknown perturbation sequence kind '" + name + "'");
}

bool IsNoiseSequence(SequenceKind kind) {
  return kind == SequenceKind::kGaussianNoise || kind == SequenceKind::kShotNoise;
}

Image GeometricFrame(const Image& clean, SequenceKind kind, int step) {
  if (step < 0) throw InvalidArgumentError("negative sequence step");
  if (step == 0) return clean;
  const double cx = 0.5 * (clean.width() - 1);
  const double cy = 0.5 * (clean.height() - 1);
  switch (kind) {
    case SequenceKind::kTranslate:
      return Warp(clean, [step](double x, double y) {
        return std::pair{x - static_cast<double>(step), y};
      });
    case SequenceKind::kRotate: {
      const double a = step * kRotateDegreesPerFrame * std::numbers::pi / 180.0;
      const double ca = std::cos(a), sa = std::sin(a);
      return Warp(clean, [=](double x, double y) {
        const double dx = x - cx, dy = y - cy;
        return std::pair{cx + ca * dx + sa * dy, cy - sa * dx + ca * dy};
      });
    }
    case SequenceKind::kScale: {
      const double s = 1.0 + step * kScalePerFrame;
      return Warp(clean, [=](double x, double y) {
        return std::pair{cx + (x - cx) / s, cy + (y - cy) / s};
      });
    }
    case SequenceKind::kTilt: {
      const double shear = step * kShearPerFrame;
      return Warp(clean, [=](double x, double y) {
        return std::pair{x - shear * (y - cy), y};
      });
    }
    case SequenceKind::kBrightness: {
      Image out = clean;
      for (double& v : out.mutable_data()) v += step * kBrightnessPerFrame;
      out.ClampToUnit();
      return out;
    }
    default:
      throw InvalidArgumentError(SequenceKindName(kind) + " is not a geometric kind");
  }
}

PerturbationSequence BuildSequence(const Image& clean, SequenceKind kind, int length, Rng& rng) {
  if (length < 1) throw InvalidArgumentError("sequence length must be >= 1");
  PerturbationSequence seq;
  seq.kind = kind;
  if (length == 1) {
    seq.frames.push_back(clean);
    return seq;
  }
  for (int j = 0; j < length; ++j) {
    Image frame;
    if (kind == SequenceKind::kGaussianNoise) {
      frame = ApplyCorruptionMagnitude(clean, CorruptionKind::kGaussianNoise, kSequenceNoiseSigma,
                                       rng);
    } else if (kind == SequenceKind::kShotNoise) {
      frame = ApplyCorruptionMagnitude(clean, CorruptionKind::kShotNoise,
                                       1.0 / kSequenceShotLambda, rng);
    } else {
      frame = GeometricFrame(clean, kind, j);
    }
    if (IsNoiseSequence(kind) || j > 0) frame.QuantizeTo8Bit();
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

std::vector<PerturbationSequence> BuildPerturbationSequences(const Dataset& dataset,
                                                             SequenceKind kind, int length,
                                                             std::uint64_t seed, int workers) {
  if (length < 1) throw InvalidArgumentError("sequence length must be >= 1");
  std::vector<PerturbationSequence> out(dataset.size());
  const std::string stream = "sequence/" + SequenceKindName(kind);
  ParallelFor(dataset.size(), workers, [&](std::size_t i) {
    Rng rng = MakeRng(seed, stream, i);
    out[i] = BuildSequence(dataset[i].image, kind, length, rng);
    out[i].source_index = i;
    out[i].label = dataset[i].label;
  });
  return out;
}

}  // namespace zsrobust
