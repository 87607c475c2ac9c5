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

#ifndef ZSROBUST_ATTACKS_ESTIMATOR_H_
#define ZSROBUST_ATTACKS_ESTIMATOR_H_

#include <functional>

#include "zsrobust/attacks/attack.h"
#include "zsrobust/common/rng.h"
#include "zsrobust/common/tensor.h"

namespace zsrobust {

using ScalarLoss = std::function<double(const Vec&)>;

struct GradientEstimate {
  Vec gradient;
  long queries = 0;
};

// NES: g = 1/(2 sigma n) sum_i [L(x + sigma u_i) - L(x - sigma u_i)] u_i with
// Gaussian u_i.
// SPSA: g_j = mean_i [L(x + sigma d_i) - L(x - sigma d_i)] / (2 sigma d_ij)
// with Rademacher d_i. Directions are drawn in blocks of a randomly signed
// Sylvester-Hadamard design: each d_i is uniform on {-1,1}^D and, within a
// full block, the coordinates are exactly orthogonal, which removes the
// cross-coordinate noise on linear losses.
// Either way 2n loss queries are made. Rejects odd n and sigma <= 0.
GradientEstimate EstimateGradient(const ScalarLoss& loss, const Vec& x, AttackMethod method,
                                  int samples, double sigma, Rng& rng);

// Cross-entropy of `label` (ascent direction) estimated from logits only.
GradientEstimate EstimateGradientBlackBox(const ClassifierModel& model, const Image& image,
                                          int label, const AttackConfig& config, Rng& rng);

}  // namespace zsrobust

#endif  // ZSROBUST_ATTACKS_ESTIMATOR_H_
