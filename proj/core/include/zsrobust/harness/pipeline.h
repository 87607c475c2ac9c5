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

#ifndef ZSROBUST_HARNESS_PIPELINE_H_
#define ZSROBUST_HARNESS_PIPELINE_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/harness/config.h"
#include "zsrobust/harness/ledger.h"
#include "zsrobust/model/classifier.h"
#include "zsrobust/model/dual_encoder.h"

namespace zsrobust {

// Stage order; each stage only reads files written by earlier ones.
const std::vector<std::string>& StageNames();

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  // overrides config.output_dir
  std::optional<int> workers;                       // overrides config.workers
  bool force = false;                               // ignore reusable stages
};

struct RunResult {
  std::filesystem::path run_dir;
  RunLedger ledger;
  nlohmann::json report;
  bool ok() const;
};

// Runs every stage in order. A failing stage is recorded in the ledger and
// blocks the stages that need its outputs; the rest still run and the
// report covers whatever finished.
RunResult RunExperiment(const ExperimentConfig& config, const RunOptions& options = {});

struct RunModels {
  std::vector<std::string> names;
  std::map<std::string, std::shared_ptr<const ClassifierModel>> models;
  std::set<std::string> baselines;
  std::shared_ptr<const DualEncoder> encoder;  // null without a dual encoder
};

// Models of a finished "models" stage, plus the searched-prompt classifier
// when `with_auto_prompts` is set and its prompt set exists.
RunModels LoadRunModels(const std::filesystem::path& run_dir, bool with_auto_prompts);

// Evenly spaced positions 0, n/m, 2n/m, ... so subsets cover every class of
// a class-major dataset.
std::vector<std::size_t> SpreadIndices(std::size_t n, std::size_t m);

}  // namespace zsrobust

#endif  // ZSROBUST_HARNESS_PIPELINE_H_
