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

#ifndef ZSROBUST_ATTACKS_DIVERSITY_H_
#define ZSROBUST_ATTACKS_DIVERSITY_H_

#include "zsrobust/common/image.h"
#include "zsrobust/common/rng.h"
#include "zsrobust/common/tensor.h"

namespace zsrobust {

// Nearest-neighbour resize to (rh, rw) placed at (top, left) inside a zero
// canvas of the original size. Linear in the image, so the gradient through
// it is the adjoint scatter.
struct ResizePad {
  int height = 0, width = 0;
  int resized_height = 0, resized_width = 0;
  int top = 0, left = 0;

  Image Apply(const Image& image) const;
  Vec Adjoint(const Vec& gradient) const;
  bool IsIdentity() const { return resized_height == height && resized_width == width; }
};

// Scale uniform in [min_scale, 1], offsets uniform over the free margin.
ResizePad SampleResizePad(int height, int width, double min_scale, Rng& rng);

}  // namespace zsrobust

#endif  // ZSROBUST_ATTACKS_DIVERSITY_H_
