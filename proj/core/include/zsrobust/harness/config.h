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

#ifndef ZSROBUST_HARNESS_CONFIG_H_
#define ZSROBUST_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/attacks/attack.h"
#include "zsrobust/harness/pretrain.h"
#include "zsrobust/model/network.h"
#include "zsrobust/promptsearch/search.h"

namespace zsrobust {

inline constexpr int kExperimentConfigVersion = 1;

struct DataSection {
  std::vector<std::string> classes;  // empty means every toy class
  int image_size = 64;
  int train_per_class = 60;
  int test_per_class = 20;
  std::vector<std::string> shifts = {"background", "texture"};
};

struct ClassifierSection {
  std::string name;
  ArchSpec arch;
  TrainConfig train;
  // Baselines define the trend that effective robustness is measured from.
  bool baseline = true;
};

struct DualEncoderSection {
  ArchSpec arch;
  TrainConfig train;
  PretrainSpec pretrain;
  std::vector<std::string> prompts = {"a photo of a {}"};
};

struct TypographicSection {
  int k_coords = 8;
  int font_scale = 0;
};

struct CorruptionSection {
  std::vector<std::string> kinds;  // empty means all
  std::size_t max_images = 0;      // 0 means the whole test set
};

struct AttackRun {
  AttackConfig config;
  std::vector<std::string> models;  // empty means every model
  std::optional<std::string> substitute;
};

struct AttackSection {
  std::size_t max_images = 20;
  std::vector<AttackRun> runs;
};

struct StabilitySection {
  std::vector<std::string> kinds;  // empty means all
  int length = 8;
  std::size_t max_images = 20;
  std::optional<std::string> reference;
};

struct DedupSection {
  std::vector<double> thresholds = {0.80, 0.85, 0.90, 0.95, 0.99};
  std::optional<std::string> model;  // classifier re-evaluated on the cleaned set
};

// One versioned JSON document describing a whole run. Nested sections never
// carry seeds of their own: every stage derives its seed from `seed`.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output_dir = "zsrobust-out";
  DataSection data;
  std::vector<ClassifierSection> classifiers;
  std::optional<DualEncoderSection> dual_encoder;
  std::optional<PromptSearchConfig> promptsearch;
  std::optional<TypographicSection> typographic;
  std::optional<CorruptionSection> corruptions;
  AttackSection attacks;
  std::optional<StabilitySection> stability;
  std::optional<DedupSection> dedup;
  std::optional<std::string> relative_reference;  // defaults to the first classifier

  // Names of every model the run produces, classifiers first.
  std::vector<std::string> ModelNames() const;
  void Validate() const;
};

inline constexpr char kZeroShotModel[] = "zero-shot";
inline constexpr char kZeroShotAutoModel[] = "zero-shot-auto";

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
// Canonical form; seeds inside nested sections are omitted.
nlohmann::json ExperimentConfigToJson(const ExperimentConfig& config);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// A small but complete configuration: three baseline classifiers, a dual
// encoder, typographic and corruption shifts, FGSM in both modes, stability
// and dedup.
ExperimentConfig DefaultExperimentConfig();

}  // namespace zsrobust

#endif  // ZSROBUST_HARNESS_CONFIG_H_
