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

#ifndef ZSROBUST_SHIFTGEN_TYPOGRAPHIC_H_
#define ZSROBUST_SHIFTGEN_TYPOGRAPHIC_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/common/dataset.h"
#include "zsrobust/common/rng.h"

namespace zsrobust {

// Conventional coordinate counts for large and small images.
inline constexpr int kImageNetStyleCoords = 8;
inline constexpr int kCifarStyleCoords = 4;
// Coordinates keep a window of this many characters inside the image.
inline constexpr int kCoordinateWindowChars = 8;

struct TextPoint {
  int x = 0;
  int y = 0;
  bool operator==(const TextPoint&) const = default;
};

struct TextBox {
  int x = 0, y = 0, width = 0, height = 0;
  bool Contains(int px, int py) const {
    return px >= x && px < x + width && py >= y && py < y + height;
  }
};

struct TypographicSpec {
  int k_coords = kImageNetStyleCoords;
  // Sampled from the seed when absent.
  std::optional<std::vector<TextPoint>> coordinates;
  int font_scale = 0;  // 0 picks AutoFontScale(height)
  std::uint64_t seed = 0;
};

// Glyph height close to max(8, 7% of the image height).
int AutoFontScale(int image_height);

// Uniform over positions keeping a kCoordinateWindowChars-wide text window
// in bounds (collapsing to 0 when the window is wider than the image).
std::vector<TextPoint> SampleCoordinates(const ImageShape& shape, int k, int font_scale, Rng& rng);

// Uniform over every class except `label`: t ~ U{0..C-2}, shifted past label.
int SampleTarget(int label, int num_classes, Rng& rng);

// Placement of `text` at `at`: x is pulled left so the text fits; text wider
// than the image is cut to whole characters. `truncated` reports the cut.
struct TextLayout {
  std::string text;
  TextBox box;
  bool truncated = false;
};
TextLayout LayoutText(const ImageShape& shape, const std::string& text, TextPoint at,
                      int font_scale);

// White glyphs on a black rectangle covering exactly the layout box.
void RenderText(Image& image, const TextLayout& layout, int font_scale);

struct TypographicResult {
  Dataset dataset;
  nlohmann::json generator;  // seed, coordinates, font scale, targets, truncations
  std::vector<TextPoint> coordinates;
  int font_scale = 1;
};

// Renders a sampled target class name (lowercased) at every coordinate of
// each image. Coordinates and targets come from dedicated streams so the
// output does not depend on `workers`.
TypographicResult GenerateTypographicDataset(const Dataset& source, const TypographicSpec& spec,
                                             int workers = 1);

}  // namespace zsrobust

#endif  // ZSROBUST_SHIFTGEN_TYPOGRAPHIC_H_
