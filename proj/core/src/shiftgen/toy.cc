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

#include "zsrobust/shiftgen/toy.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"

namespace zsrobust {
namespace {

using Rgb = std::array<double, 3>;

constexpr std::array<Rgb, 6> kClassColors = {{
    {0.90, 0.20, 0.20},  // disk
    {0.20, 0.80, 0.30},  // box
    {0.25, 0.40, 0.95},  // ring
    {0.90, 0.85, 0.20},  // plus
    {0.85, 0.30, 0.85},  // bar
    {0.20, 0.85, 0.85},  // kite
}};

// Signed inside test in coordinates relative to the shape centre, scaled by
// the shape radius.
bool Inside(int shape, double u, double v) {
  switch (shape) {
    case 0: return u * u + v * v <= 1.0;
    case 1: return std::abs(u) <= 0.8 && std::abs(v) <= 0.8;
    case 2: {
      const double r2 = u * u + v * v;
      return r2 <= 1.0 && r2 >= 0.45;
    }
    case 3: return (std::abs(u) <= 0.3 && std::abs(v) <= 1.0) ||
                   (std::abs(v) <= 0.3 && std::abs(u) <= 1.0);
    case 4: return std::abs(u) <= 1.0 && std::abs(v) <= 0.35;
    case 5: return std::abs(u) + std::abs(v) <= 1.0;
    default: return false;
  }
}

}  // namespace

std::string ToyShiftName(ToyShift shift) {
  switch (shift) {
    case ToyShift::kNone: return "none";
    case ToyShift::kBackground: return "background";
    case ToyShift::kTexture: return "texture";
  }
  return "unknown";
}

ToyShift ParseToyShift(const std::string& name) {
  if (name == "none") return ToyShift::kNone;
  if (name == "background") return ToyShift::kBackground;
  if (name == "texture") return ToyShift::kTexture;
  throw InvalidArgumentError("unknown toy shift '" + name + "'");
}

const std::vector<std::string>& ToyClassNames() {
  static const std::vector<std::string> kNames = {"disk", "box", "ring", "plus", "bar", "kite"};
  return kNames;
}

Image RenderToyImage(int shape_index, int size, ToyShift shift, Rng& rng) {
  if (size < kMinToyImageSize) {
    throw InvalidArgumentError("toy images need at least " + std::to_string(kMinToyImageSize) +
                               " pixels per side, got " + std::to_string(size));
  }
  if (shape_index < 0 || shape_index >= static_cast<int>(kClassColors.size())) {
    throw InvalidArgumentError("unknown toy shape index " + std::to_string(shape_index));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.03);

  Rgb bg{};
  Rgb bg2{};
  if (shift == ToyShift::kBackground) {
    for (auto& c : bg) c = 0.55 + 0.35 * unit(rng);
    for (auto& c : bg2) c = 0.55 + 0.35 * unit(rng);
  } else {
    for (auto& c : bg) c = 0.05 + 0.2 * unit(rng);
    bg2 = bg;
  }
  Rgb fg = kClassColors[static_cast<std::size_t>(shape_index)];
  for (auto& c : fg) c = std::clamp(c + 0.2 * (unit(rng) - 0.5), 0.0, 1.0);

  const double s = static_cast<double>(size);
  const double radius = s * (0.25 + 0.12 * unit(rng));
  const double cx = s * 0.5 + s * 0.15 * (unit(rng) - 0.5) * 2.0;
  const double cy = s * 0.5 + s * 0.15 * (unit(rng) - 0.5) * 2.0;
  const int stripe = 2 + static_cast<int>(unit(rng) * 3.0);

  Image img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double u = (x + 0.5 - cx) / radius;
      const double v = (y + 0.5 - cy) / radius;
      const bool in = Inside(shape_index, u, v);
      const double t = static_cast<double>(y) / (s - 1.0);
      for (int c = 0; c < kImageChannels; ++c) {
        double value;
        if (in) {
          value = fg[static_cast<std::size_t>(c)];
          if (shift == ToyShift::kTexture && ((x / stripe + y / stripe) % 2 == 0)) value *= 0.55;
        } else {
          value = (1.0 - t) * bg[static_cast<std::size_t>(c)] + t * bg2[static_cast<std::size_t>(c)];
          if (shift == ToyShift::kTexture && (x / stripe) % 2 == 0) value += 0.25;
        }
        img.at(c, y, x) = value + noise(rng);
      }
    }
  }
  img.ClampToUnit();
  img.QuantizeTo8Bit();
  return img;
}

Dataset GenerateToyDataset(const ToyDatasetSpec& spec, int workers) {
  if (spec.classes.size() < 2) throw InvalidArgumentError("toy datasets need at least 2 classes");
  if (spec.n_per_class < 1) throw InvalidArgumentError("n_per_class must be positive");
  if (spec.image_size < kMinToyImageSize) {
    throw InvalidArgumentError("image size " + std::to_string(spec.image_size) +
                               " is too small to render toy shapes (minimum " +
                               std::to_string(kMinToyImageSize) + ")");
  }
  const auto& all = ToyClassNames();
  std::vector<int> shapes;
  for (const auto& name : spec.classes) {
    const auto it = std::find(all.begin(), all.end(), name);
    if (it == all.end()) throw InvalidArgumentError("unknown toy class '" + name + "'");
    shapes.push_back(static_cast<int>(it - all.begin()));
  }
  const std::size_t n = spec.classes.size() * static_cast<std::size_t>(spec.n_per_class);
  std::vector<LabeledExample> examples(n);
  const std::string stream = "toy/" + spec.name + "/" + ToyShiftName(spec.shift);
  ParallelFor(n, workers, [&](std::size_t i) {
    const int label = static_cast<int>(i / static_cast<std::size_t>(spec.n_per_class));
    Rng rng = MakeRng(spec.seed, stream, i);
    examples[i].label = label;
    examples[i].image =
        RenderToyImage(shapes[static_cast<std::size_t>(label)], spec.image_size, spec.shift, rng);
  });
  return Dataset(spec.name, spec.classes, std::move(examples));
}

nlohmann::json ToyGeneratorJson(const ToyDatasetSpec& spec) {
  return {{"kind", "toy"},
          {"classes", spec.classes},
          {"n_per_class", spec.n_per_class},
          {"image_size", spec.image_size},
          {"shift", ToyShiftName(spec.shift)},
          {"seed", spec.seed}};
}

}  // namespace zsrobust
