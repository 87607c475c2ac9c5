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

#include "zsrobust/shiftgen/typographic.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"
#include "zsrobust/shiftgen/font.h"

namespace zsrobust {
namespace {

std::string Lowercase(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

int AutoFontScale(int image_height) {
  const double target = std::max(8.0, 0.07 * image_height);
  return std::max(1, static_cast<int>(std::lround(target / kGlyphSize)));
}

std::vector<TextPoint> SampleCoordinates(const ImageShape& shape, int k, int font_scale,
                                         Rng& rng) {
  if (k < 0) throw InvalidArgumentError("coordinate count must be non-negative");
  if (font_scale < 1) throw InvalidArgumentError("font scale must be >= 1");
  const int cell = kGlyphSize * font_scale;
  const int max_x = std::max(0, shape.width - kCoordinateWindowChars * cell);
  const int max_y = std::max(0, shape.height - cell);
  std::uniform_int_distribution<int> ux(0, max_x), uy(0, max_y);
  std::vector<TextPoint> points;
  for (int i = 0; i < k; ++i) {
    const int x = ux(rng);
    const int y = uy(rng);
    points.push_back({x, y});
  }
  return points;
}

int SampleTarget(int label, int num_classes, Rng& rng) {
  if (num_classes < 2) throw InvalidArgumentError("targeted sampling needs at least 2 classes");
  if (label < 0 || label >= num_classes) throw InvalidArgumentError("label out of range");
  const int t = std::uniform_int_distribution<int>(0, num_classes - 2)(rng);
  return t >= label ? t + 1 : t;
}

TextLayout LayoutText(const ImageShape& shape, const std::string& text, TextPoint at,
                      int font_scale) {
  if (font_scale < 1) throw InvalidArgumentError("font scale must be >= 1");
  const int cell = kGlyphSize * font_scale;
  TextLayout layout;
  layout.text = text;
  const int fit = shape.width / cell;
  if (static_cast<int>(layout.text.size()) > fit) {
    layout.text.resize(static_cast<std::size_t>(std::max(0, fit)));
    layout.truncated = true;
  }
  const int width = static_cast<int>(layout.text.size()) * cell;
  const int height = std::min(cell, shape.height);
  layout.box.x = std::clamp(at.x, 0, std::max(0, shape.width - width));
  layout.box.y = std::clamp(at.y, 0, std::max(0, shape.height - height));
  layout.box.width = width;
  layout.box.height = width > 0 ? height : 0;
  return layout;
}

void RenderText(Image& image, const TextLayout& layout, int font_scale) {
  const TextBox& b = layout.box;
  for (int c = 0; c < kImageChannels; ++c) {
    for (int y = b.y; y < b.y + b.height; ++y) {
      for (int x = b.x; x < b.x + b.width; ++x) {
        const int gx = (x - b.x) / font_scale;
        const int gy = (y - b.y) / font_scale;
        const char ch = layout.text[static_cast<std::size_t>(gx / kGlyphSize)];
        image.at(c, y, x) = GlyphPixel(ch, gy, gx % kGlyphSize) ? 1.0 : 0.0;
      }
    }
  }
}

TypographicResult GenerateTypographicDataset(const Dataset& source, const TypographicSpec& spec,
                                             int workers) {
  if (source.num_classes() < 2) {
    throw InvalidArgumentError("typographic attacks need at least 2 classes");
  }
  if (source.empty()) throw InvalidArgumentError("typographic source dataset is empty");
  source.Validate();
  const ImageShape shape = source.input_shape();
  TypographicResult result;
  result.font_scale = spec.font_scale > 0 ? spec.font_scale : AutoFontScale(shape.height);
  if (spec.coordinates) {
    result.coordinates = *spec.coordinates;
    if (static_cast<int>(result.coordinates.size()) != spec.k_coords) {
      throw InvalidArgumentError("coordinate list length differs from k_coords");
    }
  } else {
    Rng coord_rng = MakeRng(spec.seed, "typographic/coordinates");
    result.coordinates = SampleCoordinates(shape, spec.k_coords, result.font_scale, coord_rng);
  }

  // Targets are drawn sequentially from their own stream.
  Rng target_rng = MakeRng(spec.seed, "typographic/targets");
  std::vector<LabeledExample> examples = source.examples();
  for (auto& ex : examples) ex.target = SampleTarget(ex.label, source.num_classes(), target_rng);

  std::vector<std::string> names;
  for (const auto& n : source.class_names()) names.push_back(Lowercase(n));
  std::vector<char> truncated(examples.size(), 0);
  ParallelFor(examples.size(), workers, [&](std::size_t i) {
    const std::string& text = names[static_cast<std::size_t>(*examples[i].target)];
    for (const TextPoint& p : result.coordinates) {
      const TextLayout layout = LayoutText(shape, text, p, result.font_scale);
      truncated[i] |= layout.truncated;
      RenderText(examples[i].image, layout, result.font_scale);
    }
  });

  nlohmann::json coords = nlohmann::json::array();
  for (const auto& p : result.coordinates) coords.push_back({p.x, p.y});
  nlohmann::json targets = nlohmann::json::array();
  nlohmann::json cut = nlohmann::json::array();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    targets.push_back(*examples[i].target);
    if (truncated[i]) cut.push_back(i);
  }
  result.generator = {{"kind", "typographic"},
                      {"seed", spec.seed},
                      {"k_coords", spec.k_coords},
                      {"font_scale", result.font_scale},
                      {"coordinates", coords},
                      {"targets", targets},
                      {"truncated", cut},
                      {"source", source.Identity()}};
  result.dataset = Dataset(source.name() + "-typographic", source.class_names(),
                           std::move(examples));
  return result;
}

}  // namespace zsrobust
