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

#include "zsrobust/harness/config.h"

#include <algorithm>
#include <set>

#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/shiftgen/corruptions.h"
#include "zsrobust/shiftgen/sequences.h"
#include "zsrobust/shiftgen/toy.h"

namespace zsrobust {
namespace {

using json = nlohmann::json;

void CheckKeys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

void RejectSeed(const json& j, const std::string& where) {
  if (j.is_object() && j.contains("seed")) {
    throw ConfigError(where + " must not set a seed; seeds derive from the top-level seed");
  }
}

json WithoutSeed(json j) {
  j.erase("seed");
  return j;
}

template <typename T>
T Get(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

ClassifierSection ClassifierFromJson(const json& j) {
  CheckKeys(j, {"name", "arch", "train", "baseline"}, "classifier");
  ClassifierSection c;
  c.name = Get<std::string>(j, "name", "", "classifier");
  if (j.contains("arch")) c.arch = ArchSpecFromJson(j["arch"]);
  if (j.contains("train")) {
    RejectSeed(j["train"], "classifier.train");
    c.train = TrainConfigFromJson(j["train"]);
  }
  c.baseline = Get<bool>(j, "baseline", true, "classifier");
  return c;
}

}  // namespace

std::vector<std::string> ExperimentConfig::ModelNames() const {
  std::vector<std::string> names;
  for (const auto& c : classifiers) names.push_back(c.name);
  if (dual_encoder) {
    names.emplace_back(kZeroShotModel);
    if (promptsearch) names.emplace_back(kZeroShotAutoModel);
  }
  return names;
}

void ExperimentConfig::Validate() const {
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
  if (data.image_size < kMinToyImageSize) throw ConfigError("data.image_size is too small");
  if (data.train_per_class < 1 || data.test_per_class < 1) {
    throw ConfigError("data needs at least one image per class in each split");
  }
  for (const auto& c : data.classes) {
    if (std::find(ToyClassNames().begin(), ToyClassNames().end(), c) == ToyClassNames().end()) {
      throw ConfigError("unknown toy class '" + c + "'");
    }
  }
  for (const auto& s : data.shifts) {
    try {
      if (ParseToyShift(s) == ToyShift::kNone) throw ConfigError("shift 'none' is the test set");
    } catch (const InvalidArgumentError& e) {
      throw ConfigError(e.what());
    }
  }
  if (classifiers.empty()) throw ConfigError("at least one classifier is required");
  std::set<std::string> names;
  for (const auto& n : ModelNames()) {
    if (n.empty()) throw ConfigError("classifier name is empty");
    if (n.find_first_of("/\\ ") != std::string::npos) {
      throw ConfigError("model name '" + n + "' must not contain slashes or spaces");
    }
    if (!names.insert(n).second) throw ConfigError("duplicate model name '" + n + "'");
  }
  if (promptsearch && !dual_encoder) throw ConfigError("promptsearch needs a dual_encoder");
  if (dedup && !dual_encoder) throw ConfigError("dedup uses the dual encoder as its detector");
  const auto known = [&](const std::optional<std::string>& n, const std::string& what) {
    if (n && !names.count(*n)) throw ConfigError(what + " names unknown model '" + *n + "'");
  };
  known(relative_reference, "relative_reference");
  if (stability) {
    known(stability->reference, "stability.reference");
    if (stability->length < 2) throw ConfigError("stability.length must be at least 2");
    for (const auto& k : stability->kinds) {
      try {
        ParseSequenceKind(k);
      } catch (const InvalidArgumentError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (corruptions) {
    for (const auto& k : corruptions->kinds) {
      try {
        ParseCorruptionKind(k);
      } catch (const InvalidArgumentError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (dedup) {
    known(dedup->model, "dedup.model");
    if (dedup->thresholds.empty()) throw ConfigError("dedup.thresholds is empty");
    if (!std::is_sorted(dedup->thresholds.begin(), dedup->thresholds.end())) {
      throw ConfigError("dedup.thresholds must be sorted ascending");
    }
  }
  if (typographic && (typographic->k_coords < 1 || typographic->font_scale < 0)) {
    throw ConfigError("typographic.k_coords must be >= 1 and font_scale >= 0");
  }
  for (const auto& run : attacks.runs) {
    for (const auto& m : run.models) known(m, "attack run");
    known(run.substitute, "attack substitute");
  }
}

ExperimentConfig ExperimentConfigFromJson(const json& j) {
  CheckKeys(j,
            {"version", "seed", "workers", "output_dir", "data", "classifiers", "dual_encoder",
             "promptsearch", "typographic", "corruptions", "attacks", "stability", "dedup",
             "relative_reference"},
            "experiment config");
  if (!j.contains("version")) throw ConfigError("experiment config has no version");
  const int version = Get<int>(j, "version", 0, "config");
  if (version != kExperimentConfigVersion) {
    throw ConfigError("unsupported experiment config version " + std::to_string(version));
  }
  ExperimentConfig c;
  c.seed = Get<std::uint64_t>(j, "seed", c.seed, "config");
  c.workers = Get<int>(j, "workers", c.workers, "config");
  c.output_dir = Get<std::string>(j, "output_dir", c.output_dir, "config");

  if (j.contains("data")) {
    const json& d = j["data"];
    CheckKeys(d, {"classes", "image_size", "train_per_class", "test_per_class", "shifts"}, "data");
    c.data.classes = Get(d, "classes", c.data.classes, "data");
    c.data.image_size = Get(d, "image_size", c.data.image_size, "data");
    c.data.train_per_class = Get(d, "train_per_class", c.data.train_per_class, "data");
    c.data.test_per_class = Get(d, "test_per_class", c.data.test_per_class, "data");
    c.data.shifts = Get(d, "shifts", c.data.shifts, "data");
  }
  if (j.contains("classifiers")) {
    if (!j["classifiers"].is_array()) throw ConfigError("classifiers must be an array");
    for (const auto& cj : j["classifiers"]) c.classifiers.push_back(ClassifierFromJson(cj));
  }
  if (j.contains("dual_encoder") && !j["dual_encoder"].is_null()) {
    const json& d = j["dual_encoder"];
    CheckKeys(d, {"arch", "train", "pretrain", "prompts"}, "dual_encoder");
    DualEncoderSection s;
    if (d.contains("arch")) s.arch = ArchSpecFromJson(d["arch"]);
    if (d.contains("train")) {
      RejectSeed(d["train"], "dual_encoder.train");
      s.train = TrainConfigFromJson(d["train"]);
    }
    if (d.contains("pretrain")) {
      RejectSeed(d["pretrain"], "dual_encoder.pretrain");
      s.pretrain = PretrainSpecFromJson(d["pretrain"]);
    }
    s.prompts = Get(d, "prompts", s.prompts, "dual_encoder");
    if (s.prompts.empty()) throw ConfigError("dual_encoder.prompts is empty");
    c.dual_encoder = std::move(s);
  }
  if (j.contains("promptsearch") && !j["promptsearch"].is_null()) {
    RejectSeed(j["promptsearch"], "promptsearch");
    c.promptsearch = PromptSearchConfigFromJson(j["promptsearch"]);
  }
  if (j.contains("typographic") && !j["typographic"].is_null()) {
    const json& t = j["typographic"];
    CheckKeys(t, {"k_coords", "font_scale"}, "typographic");
    TypographicSection s;
    s.k_coords = Get(t, "k_coords", s.k_coords, "typographic");
    s.font_scale = Get(t, "font_scale", s.font_scale, "typographic");
    c.typographic = s;
  }
  if (j.contains("corruptions") && !j["corruptions"].is_null()) {
    const json& t = j["corruptions"];
    CheckKeys(t, {"kinds", "max_images"}, "corruptions");
    CorruptionSection s;
    s.kinds = Get(t, "kinds", s.kinds, "corruptions");
    s.max_images = Get(t, "max_images", s.max_images, "corruptions");
    c.corruptions = s;
  }
  if (j.contains("attacks")) {
    const json& a = j["attacks"];
    CheckKeys(a, {"max_images", "runs"}, "attacks");
    c.attacks.max_images = Get(a, "max_images", c.attacks.max_images, "attacks");
    if (a.contains("runs")) {
      if (!a["runs"].is_array()) throw ConfigError("attacks.runs must be an array");
      for (json r : a["runs"]) {
        if (!r.is_object()) throw ConfigError("attack run must be an object");
        RejectSeed(r, "attack run");
        AttackRun run;
        run.models = Get(r, "models", run.models, "attack run");
        if (r.contains("substitute")) run.substitute = Get<std::string>(r, "substitute", "", "attack run");
        r.erase("models");
        r.erase("substitute");
        run.config = AttackConfigFromJson(r);
        c.attacks.runs.push_back(std::move(run));
      }
    }
  }
  if (j.contains("stability") && !j["stability"].is_null()) {
    const json& t = j["stability"];
    CheckKeys(t, {"kinds", "length", "max_images", "reference"}, "stability");
    StabilitySection s;
    s.kinds = Get(t, "kinds", s.kinds, "stability");
    s.length = Get(t, "length", s.length, "stability");
    s.max_images = Get(t, "max_images", s.max_images, "stability");
    if (t.contains("reference") && !t["reference"].is_null()) {
      s.reference = Get<std::string>(t, "reference", "", "stability");
    }
    c.stability = s;
  }
  if (j.contains("dedup") && !j["dedup"].is_null()) {
    const json& t = j["dedup"];
    CheckKeys(t, {"thresholds", "model"}, "dedup");
    DedupSection s;
    s.thresholds = Get(t, "thresholds", s.thresholds, "dedup");
    if (t.contains("model") && !t["model"].is_null()) {
      s.model = Get<std::string>(t, "model", "", "dedup");
    }
    c.dedup = s;
  }
  if (j.contains("relative_reference") && !j["relative_reference"].is_null()) {
    c.relative_reference = Get<std::string>(j, "relative_reference", "", "config");
  }
  c.Validate();
  return c;
}

json ExperimentConfigToJson(const ExperimentConfig& c) {
  json classifiers = json::array();
  for (const auto& cl : c.classifiers) {
    classifiers.push_back({{"name", cl.name},
                           {"arch", ArchSpecToJson(cl.arch)},
                           {"train", WithoutSeed(TrainConfigToJson(cl.train))},
                           {"baseline", cl.baseline}});
  }
  json j = {{"version", kExperimentConfigVersion},
            {"seed", c.seed},
            {"workers", c.workers},
            {"output_dir", c.output_dir},
            {"data",
             {{"classes", c.data.classes},
              {"image_size", c.data.image_size},
              {"train_per_class", c.data.train_per_class},
              {"test_per_class", c.data.test_per_class},
              {"shifts", c.data.shifts}}},
            {"classifiers", classifiers}};
  j["dual_encoder"] = nullptr;
  if (c.dual_encoder) {
    j["dual_encoder"] = {{"arch", ArchSpecToJson(c.dual_encoder->arch)},
                         {"train", WithoutSeed(TrainConfigToJson(c.dual_encoder->train))},
                         {"pretrain", WithoutSeed(PretrainSpecToJson(c.dual_encoder->pretrain))},
                         {"prompts", c.dual_encoder->prompts}};
  }
  j["promptsearch"] =
      c.promptsearch ? WithoutSeed(PromptSearchConfigToJson(*c.promptsearch)) : json();
  j["typographic"] = c.typographic ? json{{"k_coords", c.typographic->k_coords},
                                          {"font_scale", c.typographic->font_scale}}
                                   : json();
  j["corruptions"] = c.corruptions ? json{{"kinds", c.corruptions->kinds},
                                          {"max_images", c.corruptions->max_images}}
                                   : json();
  json runs = json::array();
  for (const auto& r : c.attacks.runs) {
    json rj = WithoutSeed(AttackConfigToJson(r.config));
    if (!r.models.empty()) rj["models"] = r.models;
    if (r.substitute) rj["substitute"] = *r.substitute;
    runs.push_back(std::move(rj));
  }
  j["attacks"] = {{"max_images", c.attacks.max_images}, {"runs", runs}};
  j["stability"] = c.stability ? json{{"kinds", c.stability->kinds},
                                      {"length", c.stability->length},
                                      {"max_images", c.stability->max_images},
                                      {"reference", c.stability->reference
                                                        ? json(*c.stability->reference)
                                                        : json()}}
                               : json();
  j["dedup"] = c.dedup ? json{{"thresholds", c.dedup->thresholds},
                              {"model", c.dedup->model ? json(*c.dedup->model) : json()}}
                       : json();
  j["relative_reference"] = c.relative_reference ? json(*c.relative_reference) : json();
  return j;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFileBytes(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return ExperimentConfigFromJson(j);
}

ExperimentConfig DefaultExperimentConfig() {
  ExperimentConfig c;
  ClassifierSection linear;
  linear.name = "linear";
  linear.arch.kind = ArchKind::kLinear;
  linear.train.epochs = 2;
  ClassifierSection small;
  small.name = "mlp-small";
  small.arch.kind = ArchKind::kMlp;
  small.arch.patch = 8;
  small.train.epochs = 2;
  ClassifierSection mlp;
  mlp.name = "mlp";
  mlp.arch.kind = ArchKind::kMlp;
  mlp.arch.patch = 8;
  mlp.train.epochs = 20;
  c.classifiers = {linear, small, mlp};

  DualEncoderSection enc;
  enc.arch.kind = ArchKind::kMlp;
  enc.arch.patch = 8;
  enc.train.epochs = 40;
  c.dual_encoder = enc;
  c.typographic = TypographicSection{};
  c.corruptions = CorruptionSection{{}, 60};

  AttackRun min_run;
  min_run.config.method = AttackMethod::kFgsm;
  min_run.config.mode = AttackMode::kMinPerturbation;
  AttackRun budget_run;
  budget_run.config.method = AttackMethod::kFgsm;
  c.attacks.runs = {min_run, budget_run};

  StabilitySection stability;
  stability.reference = "mlp";
  c.stability = stability;
  c.dedup = DedupSection{};
  c.relative_reference = "mlp";
  return c;
}

}  // namespace zsrobust
