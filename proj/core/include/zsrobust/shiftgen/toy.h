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

#ifndef ZSROBUST_SHIFTGEN_TOY_H_
#define ZSROBUST_SHIFTGEN_TOY_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/common/dataset.h"
#include "zsrobust/common/rng.h"

namespace zsrobust {

enum class ToyShift { kNone, kBackground, kTexture };

std::string ToyShiftName(ToyShift shift);
ToyShift ParseToyShift(const std::string& name);

// disk, box, ring, plus, bar, kite; each class has its own shape and hue.
const std::vector<std::string>& ToyClassNames();

struct ToyDatasetSpec {
  std::vector<std::string> classes = ToyClassNames();
  int n_per_class = 50;
  int image_size = 32;
  ToyShift shift = ToyShift::kNone;
  std::uint64_t seed = 0;
  std::string name = "toy";
};

inline constexpr int kMinToyImageSize = 8;

// Renders one image of class `label` (index into ToyClassNames()) with
// per-image jitter drawn from `rng`. Values are quantized to 8 bits.
Image RenderToyImage(int shape_index, int size, ToyShift shift, Rng& rng);

// Examples are ordered class-major; image i draws from the stream
// (seed, name, shift, i), so splits differ by name.
Dataset GenerateToyDataset(const ToyDatasetSpec& spec, int workers = 1);

nlohmann::json ToyGeneratorJson(const ToyDatasetSpec& spec);

}  // namespace zsrobust

#endif  // ZSROBUST_SHIFTGEN_TOY_H_
