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

#ifndef ZSROBUST_PROMPTSEARCH_SEARCH_H_
#define ZSROBUST_PROMPTSEARCH_SEARCH_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/promptsearch/objective.h"

namespace zsrobust {

struct PromptSearchConfig {
  std::string template_text = "[T][T][T][T][C]";
  std::string init = "A photo of a";
  int top_k = 20;
  int beam_size = 5;
  std::optional<int> steps;  // defaults to one pass over the trigger slots
  std::size_t batch_size = 512;
  std::size_t validation_size = 100;
  int ensemble_size = 4;
  std::uint64_t seed = 0;

  void Validate() const;
  int ResolvedSteps(int num_triggers) const;
};

nlohmann::json PromptSearchConfigToJson(const PromptSearchConfig& config);
PromptSearchConfig PromptSearchConfigFromJson(const nlohmann::json& j);

// Trigger ids for the initial words; one word per trigger slot.
std::vector<int> InitialTriggers(const Tokenizer& tokenizer, const std::string& init,
                                 int num_triggers);

struct TokenCandidate {
  int token = 0;
  double approx_loss = 0;
};

struct CandidateScores {
  double loss = 0;  // true loss of the current triggers on the batch
  std::vector<TokenCandidate> candidates;
};

// First-order replacement losses L + (e_t - e_current) . dL/de at template
// position `position`; the top_k smallest, ties by lowest token id.
CandidateScores ScoreTokenCandidates(const PromptObjective& objective,
                                     const std::vector<int>& triggers, std::size_t position,
                                     const std::vector<std::size_t>& batch, int top_k);

struct ScoredPrompt {
  std::vector<int> triggers;
  double loss = 0;
  int step = 0;  // search step that first produced it; 0 for the initial prompt
};

struct SearchStep {
  int step = 0;
  int trigger = 0;  // trigger ordinal expanded at this step
  double loss_before = 0;  // best parent on this step's batch
  double loss_after = 0;   // best retained beam on the same batch
  ScoredPrompt best;
};

struct BeamSearchResult {
  std::vector<ScoredPrompt> beams;  // ranked by (loss, ids) on the last batch
  std::vector<SearchStep> steps;
  // Initial prompt followed by each step's best, in discovery order.
  std::vector<ScoredPrompt> candidates;
};

// Seeded subsample of the example pool used at `step`; every index when
// the pool is no larger than the batch.
std::vector<std::size_t> ScoringBatch(std::size_t pool, std::size_t batch_size,
                                      std::uint64_t seed, int step);

// Left-to-right beam search. Each step expands every beam at the next
// trigger slot with its top_k candidates, scores the expansions by true
// loss and keeps the beam_size best of parents and expansions together.
BeamSearchResult BeamSearchPrompts(const PromptObjective& objective,
                                   const std::vector<int>& init_triggers,
                                   const PromptSearchConfig& config, int workers = 1);

struct EnsembleMember {
  std::vector<int> triggers;
  int step = 0;
  double validation_accuracy = 0;
};

struct EnsembleSelection {
  std::vector<EnsembleMember> members;
  // Fewer distinct candidates than requested; all of them were returned.
  bool insufficient = false;
};

using ValidationScorer = std::function<double(const std::vector<int>& triggers)>;

// Deduplicates by token ids (earliest step kept), ranks by validation
// accuracy with ties to the earlier step and keeps the top n.
EnsembleSelection SelectPromptEnsemble(const std::vector<ScoredPrompt>& candidates,
                                       const ValidationScorer& scorer, int n);

struct PromptSet {
  std::string template_text;
  std::string encoder_id;
  std::vector<std::vector<int>> sequences;
  std::vector<std::string> rendered;
  std::vector<double> validation_accuracy;
  nlohmann::json config;
};

PromptSet MakePromptSet(const ZeroShotPromptObjective& objective,
                        const EnsembleSelection& selection, const PromptSearchConfig& config);
nlohmann::json PromptSetToJson(const PromptSet& set);
PromptSet PromptSetFromJson(const nlohmann::json& j);
void SavePromptSet(const std::filesystem::path& path, const PromptSet& set);
PromptSet LoadPromptSet(const std::filesystem::path& path);

// Zero-shot classifier from a saved prompt set; the encoder must be the one
// the set was searched with.
std::shared_ptr<ZeroShotClassifier> PromptSetClassifier(std::shared_ptr<const DualEncoder> encoder,
                                                        const PromptSet& set,
                                                        std::vector<std::string> class_names);

struct PromptSearchOutcome {
  BeamSearchResult search;
  EnsembleSelection ensemble;
  PromptSet prompt_set;
  std::shared_ptr<ZeroShotClassifier> classifier;
};

// Seeded validation holdout, beam search on the rest, then ensemble
// selection on the holdout.
PromptSearchOutcome RunPromptSearch(std::shared_ptr<const DualEncoder> encoder,
                                    const Dataset& train, const PromptSearchConfig& config,
                                    int workers = 1);

}  // namespace zsrobust

#endif  // ZSROBUST_PROMPTSEARCH_SEARCH_H_
