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

#include "zsrobust/attacks/attack.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "zsrobust/attacks/diversity.h"
#include "zsrobust/attacks/estimator.h"
#include "zsrobust/common/error.h"
#include "zsrobust/common/rng.h"

namespace zsrobust {
namespace {

constexpr int kBudgetedSteps = 12;
constexpr int kSearchSteps = 20;
constexpr int kNesSamples = 50;
constexpr int kSpsaSamples = 64;

struct Crafted {
  Image adversarial;
  long queries = 0;
};

void AddSignStep(Image& x, const Vec& direction, double step) {
  auto& d = x.mutable_data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double g = direction(static_cast<Eigen::Index>(i));
    d[i] += step * static_cast<double>((g > 0) - (g < 0));
  }
}

void RequireGradient(const ClassifierModel& model, AttackMethod method) {
  if (method == AttackMethod::kDeepFool) {
    if (!model.has_logit_vjp()) {
      throw UnsupportedCapabilityError("DeepFool needs per-class logit gradients");
    }
  } else if (!model.has_input_gradient()) {
    throw UnsupportedCapabilityError("white-box " + AttackMethodName(method) +
                                     " needs input gradients");
  }
}

void CheckExample(const ClassifierModel& model, const LabeledExample& example) {
  if (example.label < 0 || example.label >= model.num_classes()) {
    throw InvalidArgumentError("label " + std::to_string(example.label) + " outside " +
                               std::to_string(model.num_classes()) + " classes");
  }
  if (example.image.shape() != model.input_shape()) {
    throw ShapeMismatchError("model expects input " + model.input_shape().ToString() + ", got " +
                             example.image.shape().ToString());
  }
}

// Sign-gradient attacks (FGSM, BIM, MIM, DIM) and their black-box variants.
Crafted CraftIterative(const ClassifierModel& model, const LabeledExample& example,
                       const AttackConfig& config, double epsilon, std::uint64_t rng_index) {
  const Image& clean = example.image;
  Rng rng = MakeRng(config.seed, "attack", rng_index);
  Crafted out{clean, 0};
  if (config.method == AttackMethod::kFgsm) {
    const Vec g = InputGradient(model, clean, example.label, LossDirection::kMaximize);
    out.queries = 1;
    AddSignStep(out.adversarial, g, epsilon);
    ProjectToBall(clean, epsilon, out.adversarial);
    return out;
  }
  const int steps = config.ResolvedSteps();
  const double alpha = config.ResolvedStepSize(epsilon);
  Vec momentum = Vec::Zero(static_cast<Eigen::Index>(clean.size()));
  std::bernoulli_distribution diversify(config.diversity_prob);
  Image& x = out.adversarial;
  for (int t = 0; t < steps; ++t) {
    Vec g;
    switch (config.method) {
      case AttackMethod::kNes:
      case AttackMethod::kSpsa: {
        GradientEstimate est = EstimateGradientBlackBox(model, x, example.label, config, rng);
        out.queries += est.queries;
        g = std::move(est.gradient);
        break;
      }
      case AttackMethod::kDim:
        if (diversify(rng)) {
          const ResizePad t_pad =
              SampleResizePad(clean.height(), clean.width(), config.diversity_min_scale, rng);
          g = t_pad.Adjoint(
              InputGradient(model, t_pad.Apply(x), example.label, LossDirection::kMaximize));
        } else {
          g = InputGradient(model, x, example.label, LossDirection::kMaximize);
        }
        ++out.queries;
        break;
      default:
        g = InputGradient(model, x, example.label, LossDirection::kMaximize);
        ++out.queries;
        break;
    }
    if (config.method == AttackMethod::kMim) {
      const double l1 = g.lpNorm<1>();
      momentum *= config.momentum;
      if (l1 > 0) momentum += g / l1;
      AddSignStep(x, momentum, alpha);
    } else {
      AddSignStep(x, g, alpha);
    }
    ProjectToBall(clean, epsilon, x);
  }
  return out;
}

AttackOutcome Judge(const ClassifierModel& judge, const LabeledExample& example, Crafted crafted) {
  AttackOutcome o;
  o.clean_prediction = Predict(judge, example.image);
  o.adversarial_prediction = Predict(judge, crafted.adversarial);
  o.success = o.adversarial_prediction != example.label;
  o.linf_distance = LinfDistance(example.image, crafted.adversarial);
  o.adversarial = std::move(crafted.adversarial);
  o.queries = crafted.queries;
  o.total_queries = crafted.queries;
  return o;
}

AttackOutcome FlaggedOutcome(const ClassifierModel& judge, const LabeledExample& example,
                             const std::string& reason) {
  AttackOutcome o;
  o.adversarial = example.image;
  o.flagged = true;
  o.flag_reason = reason;
  try {
    o.clean_prediction = Predict(judge, example.image);
    o.adversarial_prediction = o.clean_prediction;
  } catch (const Error&) {
    // The clean prediction is informational only.
  }
  return o;
}

AttackOutcome BudgetedDeepFool(const ClassifierModel& model, const LabeledExample& example,
                               const AttackConfig& config, double epsilon) {
  AttackOutcome raw = RunDeepFool(model, example, config);
  Crafted capped{raw.adversarial, raw.queries};
  ProjectToBall(example.image, epsilon, capped.adversarial);
  AttackOutcome o = Judge(model, example, std::move(capped));
  o.flagged = raw.flagged;
  o.flag_reason = raw.flag_reason;
  return o;
}

AttackOutcome MinimumSearch(const BudgetedAttack& attack, const ClassifierModel& model,
                            const LabeledExample& example, const AttackConfig& config) {
  if (config.method == AttackMethod::kDeepFool) {
    AttackOutcome o = RunDeepFool(model, example, config);
    o.found_min = o.success;
    o.min_distance = o.success ? o.linf_distance : config.epsilon_max;
    if (!o.success && !o.flagged) {
      o.flagged = true;
      o.flag_reason = "no adversarial found within the iteration limit";
    }
    return o;
  }
  return FindMinPerturbation(attack, config);
}

}  // namespace

std::string AttackMethodName(AttackMethod method) {
  switch (method) {
    case AttackMethod::kFgsm: return "fgsm";
    case AttackMethod::kBim: return "bim";
    case AttackMethod::kMim: return "mim";
    case AttackMethod::kDim: return "dim";
    case AttackMethod::kDeepFool: return "deepfool";
    case AttackMethod::kNes: return "nes";
    case AttackMethod::kSpsa: return "spsa";
  }
  return "unknown";
}

AttackMethod ParseAttackMethod(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (AttackMethod m : {AttackMethod::kFgsm, AttackMethod::kBim, AttackMethod::kMim,
                         AttackMethod::kDim, AttackMethod::kDeepFool, AttackMethod::kNes,
                         AttackMethod::kSpsa}) {
    if (AttackMethodName(m) == lower) return m;
  }
  throw InvalidArgumentError("unknown attack method '" + name + "'");
}

std::string AttackModeName(AttackMode mode) {
  return mode == AttackMode::kBudgeted ? "budgeted" : "min_perturbation";
}

AttackMode ParseAttackMode(const std::string& name) {
  if (name == "budgeted") return AttackMode::kBudgeted;
  if (name == "min_perturbation" || name == "min") return AttackMode::kMinPerturbation;
  throw InvalidArgumentError("unknown attack mode '" + name + "'");
}

std::string AttackAccessName(AttackAccess access) {
  switch (access) {
    case AttackAccess::kWhiteBox: return "white_box";
    case AttackAccess::kTransfer: return "transfer";
    case AttackAccess::kBlackBox: return "black_box";
  }
  return "unknown";
}

bool IsBlackBoxMethod(AttackMethod method) {
  return method == AttackMethod::kNes || method == AttackMethod::kSpsa;
}

void AttackConfig::Validate() const {
  if (!(epsilon >= 0 && epsilon <= 1)) throw InvalidArgumentError("epsilon must be in [0, 1]");
  if (!(epsilon_max > 0 && epsilon_max <= 1)) {
    throw InvalidArgumentError("epsilon_max must be in (0, 1]");
  }
  if (steps && *steps < 1) throw InvalidArgumentError("steps must be >= 1");
  if (step_size && !(*step_size > 0)) throw InvalidArgumentError("step_size must be positive");
  if (!(momentum >= 0)) throw InvalidArgumentError("momentum must be non-negative");
  if (!(diversity_prob >= 0 && diversity_prob <= 1)) {
    throw InvalidArgumentError("diversity_prob must be in [0, 1]");
  }
  if (!(diversity_min_scale > 0 && diversity_min_scale <= 1)) {
    throw InvalidArgumentError("diversity_min_scale must be in (0, 1]");
  }
  if (samples && (*samples < 2 || *samples % 2 != 0)) {
    throw InvalidArgumentError("estimator samples must be even and >= 2");
  }
  if (!(sigma > 0)) throw InvalidArgumentError("sigma must be positive");
  if (!(overshoot >= 0)) throw InvalidArgumentError("overshoot must be non-negative");
  if (deepfool_max_iter < 1) throw InvalidArgumentError("deepfool_max_iter must be >= 1");
  if (bisection_steps < 0) throw InvalidArgumentError("bisection_steps must be >= 0");
}

int AttackConfig::ResolvedSteps() const {
  if (steps) return *steps;
  if (method == AttackMethod::kFgsm) return 1;
  if (method == AttackMethod::kDeepFool) return deepfool_max_iter;
  return mode == AttackMode::kBudgeted ? kBudgetedSteps : kSearchSteps;
}

double AttackConfig::ResolvedStepSize(double eps) const {
  if (step_size) return *step_size;
  return std::max(eps / ResolvedSteps(), 1.0 / 255.0);
}

int AttackConfig::ResolvedSamples() const {
  if (samples) return *samples;
  return method == AttackMethod::kSpsa ? kSpsaSamples : kNesSamples;
}

nlohmann::json AttackConfigToJson(const AttackConfig& c) {
  nlohmann::json j = {{"method", AttackMethodName(c.method)},
                      {"mode", AttackModeName(c.mode)},
                      {"epsilon", c.epsilon},
                      {"momentum", c.momentum},
                      {"diversity_prob", c.diversity_prob},
                      {"diversity_min_scale", c.diversity_min_scale},
                      {"sigma", c.sigma},
                      {"overshoot", c.overshoot},
                      {"deepfool_max_iter", c.deepfool_max_iter},
                      {"epsilon_max", c.epsilon_max},
                      {"bisection_steps", c.bisection_steps},
                      {"seed", c.seed}};
  if (c.steps) j["steps"] = *c.steps;
  if (c.step_size) j["step_size"] = *c.step_size;
  if (c.samples) j["samples"] = *c.samples;
  return j;
}

AttackConfig AttackConfigFromJson(const nlohmann::json& j) {
  static const std::set<std::string> kKeys = {
      "method", "mode", "epsilon", "steps", "step_size", "momentum", "diversity_prob",
      "diversity_min_scale", "samples", "sigma", "overshoot", "deepfool_max_iter",
      "epsilon_max", "bisection_steps", "seed"};
  if (!j.is_object()) throw ConfigError("attack config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown attack config key '" + key + "'");
  }
  AttackConfig c;
  try {
    if (j.contains("method")) c.method = ParseAttackMethod(j["method"].get<std::string>());
    if (j.contains("mode")) c.mode = ParseAttackMode(j["mode"].get<std::string>());
    c.epsilon = j.value("epsilon", c.epsilon);
    if (j.contains("steps")) c.steps = j["steps"].get<int>();
    if (j.contains("step_size")) c.step_size = j["step_size"].get<double>();
    c.momentum = j.value("momentum", c.momentum);
    c.diversity_prob = j.value("diversity_prob", c.diversity_prob);
    c.diversity_min_scale = j.value("diversity_min_scale", c.diversity_min_scale);
    if (j.contains("samples")) c.samples = j["samples"].get<int>();
    c.sigma = j.value("sigma", c.sigma);
    c.overshoot = j.value("overshoot", c.overshoot);
    c.deepfool_max_iter = j.value("deepfool_max_iter", c.deepfool_max_iter);
    c.epsilon_max = j.value("epsilon_max", c.epsilon_max);
    c.bisection_steps = j.value("bisection_steps", c.bisection_steps);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("attack config: ") + e.what());
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(e.what());
  }
  try {
    c.Validate();
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(std::string("attack config: ") + e.what());
  }
  return c;
}

void ProjectToBall(const Image& clean, double epsilon, Image& candidate) {
  if (clean.shape() != candidate.shape()) throw ShapeMismatchError("projection shape mismatch");
  const auto& c = clean.data();
  auto& x = candidate.mutable_data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], std::max(0.0, c[i] - epsilon), std::min(1.0, c[i] + epsilon));
  }
}

AttackOutcome RunDeepFool(const ClassifierModel& model, const LabeledExample& example,
                          const AttackConfig& config) {
  CheckExample(model, example);
  RequireGradient(model, AttackMethod::kDeepFool);
  const Image& clean = example.image;
  const int classes = model.num_classes();
  const int label = example.label;
  Vec total = Vec::Zero(static_cast<Eigen::Index>(clean.size()));
  Crafted crafted{clean, 0};
  std::string flag;
  for (int it = 0; it < config.deepfool_max_iter && classes > 1; ++it) {
    const Vec logits = ForwardLogits(model, crafted.adversarial);
    if (Argmax(logits) != label) break;
    double best = std::numeric_limits<double>::infinity();
    Vec best_w;
    double best_f = 0;
    for (int k = 0; k < classes; ++k) {
      if (k == label) continue;
      Vec cot = Vec::Zero(classes);
      cot(k) = 1.0;
      cot(label) = -1.0;
      Vec w = model.LogitVjp(crafted.adversarial, cot);
      ++crafted.queries;
      if (!w.allFinite()) throw NumericError("non-finite DeepFool gradient");
      const double f = logits(k) - logits(label);
      const double denom = w.lpNorm<1>();
      if (denom <= 0) continue;
      const double dist = std::abs(f) / denom;
      if (dist < best) {
        best = dist;
        best_w = std::move(w);
        best_f = f;
      }
    }
    if (!std::isfinite(best)) {
      flag = "zero gradient toward every other class";
      break;
    }
    const double scale = std::abs(best_f) / best_w.lpNorm<1>();
    for (Eigen::Index i = 0; i < total.size(); ++i) {
      total(i) += scale * static_cast<double>((best_w(i) > 0) - (best_w(i) < 0));
    }
    auto& x = crafted.adversarial.mutable_data();
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::clamp(clean.data()[i] + (1.0 + config.overshoot) *
                                              total(static_cast<Eigen::Index>(i)),
                        0.0, 1.0);
    }
  }
  AttackOutcome o = Judge(model, example, std::move(crafted));
  if (!flag.empty()) {
    o.flagged = true;
    o.flag_reason = flag;
  }
  return o;
}

AttackOutcome RunWhiteBoxAttackAt(const ClassifierModel& model, const LabeledExample& example,
                                  const AttackConfig& config, double epsilon,
                                  std::uint64_t rng_index) {
  config.Validate();
  if (IsBlackBoxMethod(config.method)) {
    throw InvalidArgumentError(AttackMethodName(config.method) + " is a black-box method");
  }
  CheckExample(model, example);
  RequireGradient(model, config.method);
  if (config.method == AttackMethod::kDeepFool) {
    return BudgetedDeepFool(model, example, config, epsilon);
  }
  return Judge(model, example, CraftIterative(model, example, config, epsilon, rng_index));
}

AttackOutcome RunWhiteBoxAttack(const ClassifierModel& model, const LabeledExample& example,
                                const AttackConfig& config, std::uint64_t rng_index) {
  if (config.mode == AttackMode::kBudgeted) {
    return RunWhiteBoxAttackAt(model, example, config, config.epsilon, rng_index);
  }
  CheckExample(model, example);
  RequireGradient(model, config.method);
  return MinimumSearch(
      [&](double eps) { return RunWhiteBoxAttackAt(model, example, config, eps, rng_index); },
      model, example, config);
}

AttackOutcome RunBlackBoxAttack(const ClassifierModel& model, const LabeledExample& example,
                                const AttackConfig& config, std::uint64_t rng_index) {
  config.Validate();
  if (!IsBlackBoxMethod(config.method)) {
    throw InvalidArgumentError(AttackMethodName(config.method) + " is not a black-box method");
  }
  CheckExample(model, example);
  const auto at = [&](double eps) {
    return Judge(model, example, CraftIterative(model, example, config, eps, rng_index));
  };
  if (config.mode == AttackMode::kBudgeted) return at(config.epsilon);
  return FindMinPerturbation(at, config);
}

AttackOutcome RunTransferAttack(const ClassifierModel& substitute, const ClassifierModel& target,
                                const LabeledExample& example, const AttackConfig& config,
                                std::uint64_t rng_index) {
  config.Validate();
  if (config.method == AttackMethod::kDeepFool || IsBlackBoxMethod(config.method)) {
    throw InvalidArgumentError("transfer attacks use FGSM, BIM, MIM or DIM");
  }
  if (substitute.num_classes() != target.num_classes()) {
    throw InvalidArgumentError("substitute has " + std::to_string(substitute.num_classes()) +
                               " classes, target has " + std::to_string(target.num_classes()));
  }
  if (substitute.input_shape() != target.input_shape()) {
    throw ShapeMismatchError("substitute and target disagree on input shape");
  }
  CheckExample(target, example);
  RequireGradient(substitute, config.method);
  const auto at = [&](double eps) {
    return Judge(target, example, CraftIterative(substitute, example, config, eps, rng_index));
  };
  if (config.mode == AttackMode::kBudgeted) return at(config.epsilon);
  return FindMinPerturbation(at, config);
}

AttackOutcome FindMinPerturbation(const BudgetedAttack& attack, const AttackConfig& config) {
  AttackOutcome zero = attack(0.0);
  long total = zero.queries;
  if (zero.success) {
    zero.found_min = true;
    zero.min_distance = 0.0;
    zero.total_queries = total;
    return zero;
  }
  AttackOutcome best = attack(config.epsilon_max);
  total += best.queries;
  if (!best.success) {
    best.found_min = false;
    best.min_distance = config.epsilon_max;
    best.total_queries = total;
    if (!best.flagged) {
      best.flagged = true;
      best.flag_reason = "no adversarial found at epsilon_max";
    }
    return best;
  }
  double lo = 0.0, hi = config.epsilon_max;
  for (int i = 0; i < config.bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    AttackOutcome trial = attack(mid);
    total += trial.queries;
    if (trial.success) {
      hi = mid;
      best = std::move(trial);
    } else {
      lo = mid;
    }
  }
  best.found_min = true;
  best.min_distance = hi;
  best.total_queries = total;
  return best;
}

AttackAccess ResolveAccess(const AttackConfig& config, const ClassifierModel* substitute) {
  if (IsBlackBoxMethod(config.method)) return AttackAccess::kBlackBox;
  return substitute ? AttackAccess::kTransfer : AttackAccess::kWhiteBox;
}

AttackOutcome RunAttack(const ClassifierModel& target, const LabeledExample& example,
                        const AttackConfig& config, std::uint64_t rng_index,
                        const ClassifierModel* substitute) {
  try {
    switch (ResolveAccess(config, substitute)) {
      case AttackAccess::kBlackBox:
        return RunBlackBoxAttack(target, example, config, rng_index);
      case AttackAccess::kTransfer:
        return RunTransferAttack(*substitute, target, example, config, rng_index);
      case AttackAccess::kWhiteBox:
        return RunWhiteBoxAttack(target, example, config, rng_index);
    }
  } catch (const NumericError& e) {
    return FlaggedOutcome(target, example, std::string("numeric: ") + e.what());
  } catch (const TransportError& e) {
    return FlaggedOutcome(target, example, std::string("transport: ") + e.what());
  }
  throw InvalidArgumentError("unreachable attack access");
}

}  // namespace zsrobust
