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

#include "zsrobust/shiftgen/corruptions.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"

namespace zsrobust {
namespace {

using Table = std::array<double, 5>;

constexpr Table kGaussianSigma = {0.08, 0.12, 0.18, 0.26, 0.38};
constexpr Table kShotLambda = {60, 25, 12, 5, 3};
constexpr Table kImpulseAmount = {0.03, 0.06, 0.09, 0.17, 0.27};
constexpr Table kDefocusRadius = {1, 1.5, 2, 2.5, 3};
constexpr Table kBrightnessShift = {0.1, 0.2, 0.3, 0.4, 0.5};
constexpr Table kContrastFactor = {0.4, 0.3, 0.2, 0.1, 0.05};
constexpr Table kPixelateBlock = {2, 3, 4, 5, 6};

Image DefocusBlur(const Image& in, double radius) {
  const int r = static_cast<int>(std::floor(radius));
  std::vector<std::pair<int, int>> taps;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) taps.emplace_back(dy, dx);
    }
  }
  const double w = 1.0 / static_cast<double>(taps.size());
  Image out(in.height(), in.width());
  for (int c = 0; c < kImageChannels; ++c) {
    for (int y = 0; y < in.height(); ++y) {
      for (int x = 0; x < in.width(); ++x) {
        double acc = 0;
        for (const auto& [dy, dx] : taps) {
          acc += in.at(c, std::clamp(y + dy, 0, in.height() - 1),
                       std::clamp(x + dx, 0, in.width() - 1));
        }
        out.at(c, y, x) = acc * w;
      }
    }
  }
  return out;
}

Image Pixelate(const Image& in, int block) {
  Image out(in.height(), in.width());
  for (int c = 0; c < kImageChannels; ++c) {
    for (int by = 0; by < in.height(); by += block) {
      for (int bx = 0; bx < in.width(); bx += block) {
        const int ey = std::min(in.height(), by + block);
        const int ex = std::min(in.width(), bx + block);
        double acc = 0;
        for (int y = by; y < ey; ++y) {
          for (int x = bx; x < ex; ++x) acc += in.at(c, y, x);
        }
        acc /= static_cast<double>((ey - by) * (ex - bx));
        for (int y = by; y < ey; ++y) {
          for (int x = bx; x < ex; ++x) out.at(c, y, x) = acc;
        }
      }
    }
  }
  return out;
}

}  // namespace

std::string CorruptionKindName(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kGaussianNoise: return "gaussian_noise";
    case CorruptionKind::kShotNoise: return "shot_noise";
    case CorruptionKind::kImpulseNoise: return "impulse_noise";
    case CorruptionKind::kDefocusBlur: return "defocus_blur";
    case CorruptionKind::kBrightness: return "brightness";
    case CorruptionKind::kContrast: return "contrast";
    case CorruptionKind::kPixelate: return "pixelate";
  }
  return "unknown";
}

const std::vector<CorruptionKind>& AllCorruptionKinds() {
  static const std::vector<CorruptionKind> kAll = {
      CorruptionKind::kGaussianNoise, CorruptionKind::kShotNoise, CorruptionKind::kImpulseNoise,
      CorruptionKind::kDefocusBlur,   CorruptionKind::kBrightness, CorruptionKind::kContrast,
      CorruptionKind::kPixelate};
  return kAll;
}

CorruptionKind ParseCorruptionKind(const std::string& name) {
  for (CorruptionKind k : AllCorruptionKinds()) {
    if (CorruptionKindName(k) == name) return k;
  }
  throw InvalidArgumentError("unknown corruption '" + name + "'");
}

void CorruptionSpec::Validate() const {
  if (severity < 1 || severity > 5) {
    throw InvalidArgumentError("corruption severity must be 1..5, got " + std::to_string(severity));
  }
}

double SeverityMagnitude(CorruptionKind kind, int severity) {
  CorruptionSpec{kind, severity}.Validate();
  const auto i = static_cast<std::size_t>(severity - 1);
  switch (kind) {
    case CorruptionKind::kGaussianNoise: return kGaussianSigma[i];
    case CorruptionKind::kShotNoise: return 1.0 / kShotLambda[i];
    case CorruptionKind::kImpulseNoise: return kImpulseAmount[i];
    case CorruptionKind::kDefocusBlur: return kDefocusRadius[i];
    case CorruptionKind::kBrightness: return kBrightnessShift[i];
    case CorruptionKind::kContrast: return 1.0 - kContrastFactor[i];
    case CorruptionKind::kPixelate: return kPixelateBlock[i];
  }
  throw InvalidArgumentError("unknown corruption kind");
}

Image ApplyCorruptionMagnitude(const Image& image, CorruptionKind kind, double magnitude,
                               Rng& rng) {
  if (!(magnitude >= 0) || !std::isfinite(magnitude)) {
    throw InvalidArgumentError("corruption magnitude must be finite and non-negative");
  }
  Image out = image;
  if (magnitude == 0) return out;
  auto& d = out.mutable_data();
  switch (kind) {
    case CorruptionKind::kGaussianNoise: {
      std::normal_distribution<double> noise(0.0, magnitude);
      for (double& v : d) v += noise(rng);
      break;
    }
    case CorruptionKind::kShotNoise: {
      const double lambda = 1.0 / magnitude;
      for (double& v : d) {
        std::poisson_distribution<long> counts(std::max(v, 0.0) * lambda);
        v = static_cast<double>(counts(rng)) / lambda;
      }
      break;
    }
    case CorruptionKind::kImpulseNoise: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (double& v : d) {
        const double r = u(rng);
        if (r < magnitude) v = r < 0.5 * magnitude ? 0.0 : 1.0;
      }
      break;
    }
    case CorruptionKind::kDefocusBlur:
      out = DefocusBlur(image, magnitude);
      break;
    case CorruptionKind::kBrightness:
      for (double& v : d) v += magnitude;
      break;
    case CorruptionKind::kContrast: {
      const double c = 1.0 - magnitude;
      const std::size_t plane = static_cast<std::size_t>(image.height()) * image.width();
      for (int ch = 0; ch < kImageChannels; ++ch) {
        double mean = 0;
        for (std::size_t i = 0; i < plane; ++i) mean += d[ch * plane + i];
        mean /= static_cast<double>(plane);
        for (std::size_t i = 0; i < plane; ++i) {
          d[ch * plane + i] = (d[ch * plane + i] - mean) * c + mean;
        }
      }
      break;
    }
    case CorruptionKind::kPixelate: {
      const int block = static_cast<int>(std::lround(magnitude));
      if (block > 1) out = Pixelate(image, block);
      break;
    }
  }
  out.ClampToUnit();
  return out;
}

Image ApplyCorruption(const Image& image, const CorruptionSpec& spec, std::uint64_t seed) {
  spec.Validate();
  Rng rng = MakeRng(seed, "corruption/" + CorruptionKindName(spec.kind),
                    static_cast<std::uint64_t>(spec.severity));
  return ApplyCorruptionMagnitude(image, spec.kind, SeverityMagnitude(spec.kind, spec.severity),
                                  rng);
}

Dataset CorruptDataset(const Dataset& dataset, const CorruptionSpec& spec, std::uint64_t seed,
                       int workers) {
  spec.Validate();
  const std::string stream = "corruption/" + CorruptionKindName(spec.kind) + "/" +
                             std::to_string(spec.severity);
  const double magnitude = SeverityMagnitude(spec.kind, spec.severity);
  std::vector<LabeledExample> examples = dataset.examples();
  ParallelFor(examples.size(), workers, [&](std::size_t i) {
    Rng rng = MakeRng(seed, stream, i);
    examples[i].image = ApplyCorruptionMagnitude(examples[i].image, spec.kind, magnitude, rng);
    examples[i].image.QuantizeTo8Bit();
  });
  return Dataset(dataset.name() + "-" + CorruptionKindName(spec.kind) + "-" +
                     std::to_string(spec.severity),
                 dataset.class_names(), std::move(examples));
}

nlohmann::json CorruptionGeneratorJson(const CorruptionSpec& spec, std::uint64_t seed,
                                       const std::string& source_identity) {
  return {{"kind", "corruption"},
          {"corruption", CorruptionKindName(spec.kind)},
          {"severity", spec.severity},
          {"magnitude", SeverityMagnitude(spec.kind, spec.severity)},
          {"seed", seed},
          {"source", source_identity}};
}

}  // namespace zsrobust
