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

#ifndef ZSROBUST_ATTACKS_ATTACK_H_
#define ZSROBUST_ATTACKS_ATTACK_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/common/dataset.h"
#include "zsrobust/model/classifier.h"

namespace zsrobust {

enum class AttackMethod { kFgsm, kBim, kMim, kDim, kDeepFool, kNes, kSpsa };
enum class AttackMode { kBudgeted, kMinPerturbation };
enum class AttackAccess { kWhiteBox, kTransfer, kBlackBox };

std::string AttackMethodName(AttackMethod method);
AttackMethod ParseAttackMethod(const std::string& name);
std::string AttackModeName(AttackMode mode);
AttackMode ParseAttackMode(const std::string& name);
std::string AttackAccessName(AttackAccess access);

bool IsBlackBoxMethod(AttackMethod method);

// l-infinity attack settings. Unset optionals resolve to per-method
// defaults: 12 iterations for budgeted runs, 20 inside the minimum
// perturbation search, step size max(eps/steps, 1/255), 50 estimator
// directions for NES and 64 for SPSA.
struct AttackConfig {
  AttackMethod method = AttackMethod::kFgsm;
  AttackMode mode = AttackMode::kBudgeted;
  double epsilon = 8.0 / 255.0;
  std::optional<int> steps;
  std::optional<double> step_size;
  double momentum = 1.0;
  double diversity_prob = 0.5;
  double diversity_min_scale = 0.9;
  std::optional<int> samples;  // estimator directions, each queried at +/- sigma
  double sigma = 0.01;
  double overshoot = 0.02;
  int deepfool_max_iter = 50;
  double epsilon_max = 1.0;
  int bisection_steps = 12;
  std::uint64_t seed = 0;

  void Validate() const;
  int ResolvedSteps() const;
  double ResolvedStepSize(double eps) const;
  int ResolvedSamples() const;
};

nlohmann::json AttackConfigToJson(const AttackConfig& config);
// Unknown keys are rejected.
AttackConfig AttackConfigFromJson(const nlohmann::json& j);

struct AttackOutcome {
  bool success = false;
  Image adversarial;
  double linf_distance = 0;  // max |adversarial - clean|
  long queries = 0;          // gradient calls (white-box) or estimator queries
  long total_queries = 0;    // summed over every trial of a minimum search
  bool found_min = false;
  double min_distance = 0;   // minimum perturbation mode only
  int clean_prediction = -1;
  int adversarial_prediction = -1;
  bool flagged = false;
  std::string flag_reason;
};

// Budgeted white-box attack at `epsilon` (FGSM, BIM, MIM, DIM, DeepFool).
// `rng_index` selects the random stream (DIM) derived from config.seed.
AttackOutcome RunWhiteBoxAttackAt(const ClassifierModel& model, const LabeledExample& example,
                                  const AttackConfig& config, double epsilon,
                                  std::uint64_t rng_index = 0);

// Honors config.mode: budgeted at config.epsilon, or the minimum
// perturbation search.
AttackOutcome RunWhiteBoxAttack(const ClassifierModel& model, const LabeledExample& example,
                                const AttackConfig& config, std::uint64_t rng_index = 0);

AttackOutcome RunBlackBoxAttack(const ClassifierModel& model, const LabeledExample& example,
                                const AttackConfig& config, std::uint64_t rng_index = 0);

// Crafts on `substitute` (FGSM, BIM, MIM, DIM) and judges on `target`.
AttackOutcome RunTransferAttack(const ClassifierModel& substitute, const ClassifierModel& target,
                                const LabeledExample& example, const AttackConfig& config,
                                std::uint64_t rng_index = 0);

// Runs an attack at a given budget; used by the minimum search.
using BudgetedAttack = std::function<AttackOutcome(double epsilon)>;

// Success at 0 gives distance 0. Otherwise eps_max is tried, then
// `bisection_steps` halvings of [0, eps_max] keep the smallest success.
AttackOutcome FindMinPerturbation(const BudgetedAttack& attack, const AttackConfig& config);

// DeepFool (multiclass l-infinity). Returns the unprojected result.
AttackOutcome RunDeepFool(const ClassifierModel& model, const LabeledExample& example,
                          const AttackConfig& config);

// Dispatches on method and on whether a substitute is given.
AttackOutcome RunAttack(const ClassifierModel& target, const LabeledExample& example,
                        const AttackConfig& config, std::uint64_t rng_index,
                        const ClassifierModel* substitute = nullptr);

AttackAccess ResolveAccess(const AttackConfig& config, const ClassifierModel* substitute);

// Projects `candidate` onto [x - eps, x + eps] and [0, 1].
void ProjectToBall(const Image& clean, double epsilon, Image& candidate);

}  // namespace zsrobust

#endif  // ZSROBUST_ATTACKS_ATTACK_H_
