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

#include "zsrobust/promptsearch/search.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"
#include "zsrobust/common/rng.h"
#include "zsrobust/metrics/accuracy.h"

namespace zsrobust {
namespace {

bool RankBefore(const ScoredPrompt& a, const ScoredPrompt& b) {
  if (a.loss != b.loss) return a.loss < b.loss;
  return a.triggers < b.triggers;
}

}  // namespace

void PromptSearchConfig::Validate() const {
  PromptTemplate::Parse(template_text);
  if (top_k < 1) throw InvalidArgumentError("top_k must be at least 1");
  if (beam_size < 1) throw InvalidArgumentError("beam_size must be at least 1");
  if (steps && *steps < 0) throw InvalidArgumentError("steps must be non-negative");
  if (batch_size < 1) throw InvalidArgumentError("batch_size must be at least 1");
  if (validation_size < 1) throw InvalidArgumentError("validation_size must be at least 1");
  if (ensemble_size < 1) throw InvalidArgumentError("ensemble_size must be at least 1");
}

int PromptSearchConfig::ResolvedSteps(int num_triggers) const {
  return steps ? *steps : num_triggers;
}

nlohmann::json PromptSearchConfigToJson(const PromptSearchConfig& c) {
  return {{"template", c.template_text},
          {"init", c.init},
          {"top_k", c.top_k},
          {"beam_size", c.beam_size},
          {"steps", c.steps ? nlohmann::json(*c.steps) : nlohmann::json()},
          {"batch_size", c.batch_size},
          {"validation_size", c.validation_size},
          {"ensemble_size", c.ensemble_size},
          {"seed", c.seed}};
}

PromptSearchConfig PromptSearchConfigFromJson(const nlohmann::json& j) {
  static const std::set<std::string> kKeys = {"template",   "init",       "top_k",
                                              "beam_size",  "steps",      "batch_size",
                                              "validation_size", "ensemble_size", "seed"};
  if (!j.is_object()) throw ConfigError("prompt search config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown prompt search config key '" + key + "'");
  }
  PromptSearchConfig c;
  try {
    c.template_text = j.value("template", c.template_text);
    c.init = j.value("init", c.init);
    c.top_k = j.value("top_k", c.top_k);
    c.beam_size = j.value("beam_size", c.beam_size);
    if (j.contains("steps") && !j["steps"].is_null()) c.steps = j["steps"].get<int>();
    c.batch_size = j.value("batch_size", c.batch_size);
    c.validation_size = j.value("validation_size", c.validation_size);
    c.ensemble_size = j.value("ensemble_size", c.ensemble_size);
    c.seed = j.value("seed", c.seed);
    c.Validate();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("prompt search config: ") + e.what());
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(std::string("prompt search config: ") + e.what());
  }
  return c;
}

std::vector<int> InitialTriggers(const Tokenizer& tokenizer, const std::string& init,
                                 int num_triggers) {
  const auto words = Tokenizer::Split(init);
  if (static_cast<int>(words.size()) != num_triggers) {
    throw ConfigError("initial prompt '" + init + "' has " + std::to_string(words.size()) +
                      " words but the template has " + std::to_string(num_triggers) +
                      " trigger slots");
  }
  std::vector<int> ids;
  for (const auto& w : words) ids.push_back(tokenizer.Lookup(w));
  return ids;
}

CandidateScores ScoreTokenCandidates(const PromptObjective& objective,
                                     const std::vector<int>& triggers, std::size_t position,
                                     const std::vector<std::size_t>& batch, int top_k) {
  const int slot = objective.prompt_template().TriggerOrdinal(position);
  const int vocab = objective.vocab_size();
  if (top_k < 1 || top_k > vocab) {
    throw InvalidArgumentError("top_k must be in [1, " + std::to_string(vocab) + "]");
  }
  CandidateScores out;
  Mat grad;
  out.loss = objective.Loss(triggers, batch, &grad);
  const Vec g = grad.row(slot).transpose();
  const Vec dots = objective.token_embeddings() * g;
  const double current = dots[triggers[static_cast<std::size_t>(slot)]];

  std::vector<TokenCandidate> all(static_cast<std::size_t>(vocab));
  for (int t = 0; t < vocab; ++t) all[static_cast<std::size_t>(t)] = {t, out.loss + (dots[t] - current)};
  const auto less = [](const TokenCandidate& a, const TokenCandidate& b) {
    return a.approx_loss != b.approx_loss ? a.approx_loss < b.approx_loss : a.token < b.token;
  };
  std::partial_sort(all.begin(), all.begin() + top_k, all.end(), less);
  all.resize(static_cast<std::size_t>(top_k));
  out.candidates = std::move(all);
  return out;
}

std::vector<std::size_t> ScoringBatch(std::size_t pool, std::size_t batch_size,
                                      std::uint64_t seed, int step) {
  if (pool == 0) throw InvalidArgumentError("empty example pool");
  std::vector<std::size_t> idx(pool);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (batch_size >= pool) return idx;
  Rng rng = MakeRng(seed, "promptsearch/batch", static_cast<std::uint64_t>(step));
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(batch_size);
  std::sort(idx.begin(), idx.end());
  return idx;
}

BeamSearchResult BeamSearchPrompts(const PromptObjective& objective,
                                   const std::vector<int>& init_triggers,
                                   const PromptSearchConfig& config, int workers) {
  config.Validate();
  objective.CheckTriggers(init_triggers);
  const PromptTemplate& tmpl = objective.prompt_template();
  const int top_k = std::min(config.top_k, objective.vocab_size());
  const int steps = config.ResolvedSteps(tmpl.num_triggers());

  BeamSearchResult result;
  const auto first_batch = ScoringBatch(objective.example_count(), config.batch_size, config.seed, 0);
  ScoredPrompt init{init_triggers, objective.Loss(init_triggers, first_batch), 0};
  result.candidates.push_back(init);
  std::vector<ScoredPrompt> beams = {init};

  for (int step = 1; step <= steps; ++step) {
    const int slot = (step - 1) % tmpl.num_triggers();
    const std::size_t position = tmpl.TriggerPosition(slot);
    const auto batch = ScoringBatch(objective.example_count(), config.batch_size, config.seed, step);

    // Parents are rescored on this step's batch so that they compete with
    // their expansions on equal terms.
    std::vector<CandidateScores> scored(beams.size());
    ParallelFor(beams.size(), workers, [&](std::size_t b) {
      scored[b] = ScoreTokenCandidates(objective, beams[b].triggers, position, batch, top_k);
    });

    std::vector<ScoredPrompt> pool;
    std::set<std::vector<int>> seen;
    for (std::size_t b = 0; b < beams.size(); ++b) {
      if (seen.insert(beams[b].triggers).second) {
        pool.push_back({beams[b].triggers, scored[b].loss, beams[b].step});
      }
    }
    const double loss_before = std::min_element(pool.begin(), pool.end(), RankBefore)->loss;
    const std::size_t parents = pool.size();
    for (std::size_t b = 0; b < beams.size(); ++b) {
      for (const auto& cand : scored[b].candidates) {
        std::vector<int> t = beams[b].triggers;
        t[static_cast<std::size_t>(slot)] = cand.token;
        if (seen.insert(t).second) pool.push_back({std::move(t), 0, step});
      }
    }
    ParallelFor(pool.size() - parents, workers, [&](std::size_t i) {
      auto& p = pool[parents + i];
      p.loss = objective.Loss(p.triggers, batch);
    });
    std::sort(pool.begin(), pool.end(), RankBefore);
    if (pool.size() > static_cast<std::size_t>(config.beam_size)) {
      pool.resize(static_cast<std::size_t>(config.beam_size));
    }
    result.steps.push_back({step, slot, loss_before, pool.front().loss, pool.front()});
    result.candidates.push_back(pool.front());
    beams = std::move(pool);
  }
  result.beams = std::move(beams);
  return result;
}

EnsembleSelection SelectPromptEnsemble(const std::vector<ScoredPrompt>& candidates,
                                       const ValidationScorer& scorer, int n) {
  if (candidates.empty()) throw InvalidArgumentError("no prompt candidates");
  if (n < 1) throw InvalidArgumentError("ensemble size must be at least 1");
  std::map<std::vector<int>, int> earliest;
  for (const auto& c : candidates) {
    auto [it, inserted] = earliest.emplace(c.triggers, c.step);
    if (!inserted) it->second = std::min(it->second, c.step);
  }
  EnsembleSelection sel;
  for (const auto& [triggers, step] : earliest) {
    sel.members.push_back({triggers, step, scorer(triggers)});
  }
  std::stable_sort(sel.members.begin(), sel.members.end(),
                   [](const EnsembleMember& a, const EnsembleMember& b) {
                     if (a.validation_accuracy != b.validation_accuracy) {
                       return a.validation_accuracy > b.validation_accuracy;
                     }
                     if (a.step != b.step) return a.step < b.step;
                     return a.triggers < b.triggers;
                   });
  if (sel.members.size() < static_cast<std::size_t>(n)) {
    sel.insufficient = true;
  } else {
    sel.members.resize(static_cast<std::size_t>(n));
  }
  return sel;
}

PromptSet MakePromptSet(const ZeroShotPromptObjective& objective,
                        const EnsembleSelection& selection, const PromptSearchConfig& config) {
  PromptSet set;
  set.template_text = objective.prompt_template().text();
  set.encoder_id = objective.encoder().snapshot_id();
  for (const auto& m : selection.members) {
    set.sequences.push_back(m.triggers);
    set.rendered.push_back(objective.Render(m.triggers));
    set.validation_accuracy.push_back(m.validation_accuracy);
  }
  set.config = PromptSearchConfigToJson(config);
  return set;
}

nlohmann::json PromptSetToJson(const PromptSet& set) {
  return {{"template", set.template_text},
          {"encoder_id", set.encoder_id},
          {"sequences", set.sequences},
          {"rendered", set.rendered},
          {"validation_accuracy", set.validation_accuracy},
          {"config", set.config}};
}

PromptSet PromptSetFromJson(const nlohmann::json& j) {
  PromptSet set;
  try {
    set.template_text = j.at("template").get<std::string>();
    set.encoder_id = j.at("encoder_id").get<std::string>();
    set.sequences = j.at("sequences").get<std::vector<std::vector<int>>>();
    set.rendered = j.at("rendered").get<std::vector<std::string>>();
    set.validation_accuracy = j.at("validation_accuracy").get<std::vector<double>>();
    set.config = j.value("config", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("prompt set: ") + e.what());
  }
  if (set.sequences.empty() || set.rendered.size() != set.sequences.size() ||
      set.validation_accuracy.size() != set.sequences.size()) {
    throw FormatError("prompt set lists are empty or of different lengths");
  }
  return set;
}

void SavePromptSet(const std::filesystem::path& path, const PromptSet& set) {
  WriteFileBytes(path, PromptSetToJson(set).dump(2) + "\n");
}

PromptSet LoadPromptSet(const std::filesystem::path& path) {
  try {
    return PromptSetFromJson(nlohmann::json::parse(ReadFileBytes(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::shared_ptr<ZeroShotClassifier> PromptSetClassifier(std::shared_ptr<const DualEncoder> encoder,
                                                        const PromptSet& set,
                                                        std::vector<std::string> class_names) {
  if (!encoder) throw InvalidArgumentError("null encoder");
  if (encoder->snapshot_id() != set.encoder_id) {
    throw InvalidArgumentError("prompt set was searched with encoder " + set.encoder_id +
                               ", not " + encoder->snapshot_id());
  }
  ZeroShotPromptObjective objective(std::move(encoder), PromptTemplate::Parse(set.template_text),
                                    std::move(class_names));
  for (const auto& s : set.sequences) objective.CheckTriggers(s);
  return objective.Classifier(set.sequences);
}

PromptSearchOutcome RunPromptSearch(std::shared_ptr<const DualEncoder> encoder,
                                    const Dataset& train, const PromptSearchConfig& config,
                                    int workers) {
  config.Validate();
  if (train.size() <= config.validation_size) {
    throw InvalidArgumentError("training set of " + std::to_string(train.size()) +
                               " examples leaves nothing after a validation holdout of " +
                               std::to_string(config.validation_size));
  }
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = MakeRng(config.seed, "promptsearch/validation");
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<long>(config.validation_size));
  std::vector<std::size_t> fit_idx(order.begin() + static_cast<long>(config.validation_size), order.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(fit_idx.begin(), fit_idx.end());
  const Dataset validation = train.Subset(val_idx, train.name() + "/validation");
  const Dataset fit = train.Subset(fit_idx, train.name() + "/search");

  ZeroShotPromptObjective objective(encoder, PromptTemplate::Parse(config.template_text), fit,
                                    workers);
  const auto init =
      InitialTriggers(encoder->tokenizer(), config.init, objective.prompt_template().num_triggers());

  PromptSearchOutcome out;
  out.search = BeamSearchPrompts(objective, init, config, workers);
  const Mat val_embeddings = objective.EmbedDataset(validation);
  const auto val_labels = Labels(validation);
  out.ensemble = SelectPromptEnsemble(
      out.search.candidates,
      [&](const std::vector<int>& t) { return objective.Accuracy(t, val_embeddings, val_labels); },
      config.ensemble_size);
  out.prompt_set = MakePromptSet(objective, out.ensemble, config);
  std::vector<std::vector<int>> sets;
  for (const auto& m : out.ensemble.members) sets.push_back(m.triggers);
  out.classifier = objective.Classifier(sets);
  return out;
}

}  // namespace zsrobust
