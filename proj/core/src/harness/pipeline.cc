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

#include "zsrobust/harness/pipeline.h"

#include <algorithm>
#include <chrono>
#include <functional>

#include "zsrobust/attacks/evaluate.h"
#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/dataset_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/common/hash.h"
#include "zsrobust/common/rng.h"
#include "zsrobust/dedup/dedup.h"
#include "zsrobust/harness/report.h"
#include "zsrobust/metrics/accuracy.h"
#include "zsrobust/metrics/stability.h"
#include "zsrobust/metrics/summary.h"
#include "zsrobust/model/snapshot.h"
#include "zsrobust/model/zero_shot.h"
#include "zsrobust/shiftgen/corruptions.h"
#include "zsrobust/shiftgen/toy.h"
#include "zsrobust/shiftgen/typographic.h"

namespace zsrobust {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr char kStandardDataset[] = "test";
constexpr char kTypographicDataset[] = "test-typographic";

json ReadJson(const fs::path& path) {
  try {
    return json::parse(ReadFileBytes(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteJson(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  WriteFileBytes(path, j.dump(2) + "\n");
}

std::string ShiftDatasetName(const std::string& shift) { return "test-" + shift; }

// Canonical config without the knobs that must not change results.
json ResultRelevantConfig(const ExperimentConfig& config) {
  json j = ExperimentConfigToJson(config);
  j.erase("workers");
  j.erase("output_dir");
  return j;
}

class Pipeline {
 public:
  Pipeline(const ExperimentConfig& config, fs::path dir, int workers, bool force)
      : config_(config), dir_(std::move(dir)), workers_(workers), force_(force) {
    previous_ = RunLedger::Load(dir_ / "ledger.json");
    ledger_.seed = config.seed;
    ledger_.config_sha256 = Sha256Hex(ResultRelevantConfig(config).dump());
    reference_ = config.relative_reference ? *config.relative_reference
                                           : config.classifiers.front().name;
  }

  RunResult Run();

 private:
  struct Stage {
    std::string name;
    std::vector<std::string> required;
    std::vector<std::string> optional;
    bool enabled = true;
    json section;
    std::function<std::vector<std::string>()> run;
  };

  std::vector<Stage> Stages();
  void Execute(const Stage& stage);
  bool Succeeded(const std::string& stage) const {
    const StageRecord* r = ledger_.Find(stage);
    return r != nullptr && StageSucceeded(r->status);
  }

  Dataset LoadSplit(const std::string& name) const { return LoadDataset(dir_ / "datasets" / name); }
  std::vector<std::string> SaveSplit(const Dataset& ds, const json& generator) const;
  RunModels Models() const { return LoadRunModels(dir_, Succeeded("promptsearch")); }
  std::uint64_t Seed(std::string_view stream, std::uint64_t index = 0) const {
    return DeriveSeed(config_.seed, stream, index);
  }

  std::vector<std::string> RunData();
  std::vector<std::string> RunModelsStage();
  std::vector<std::string> RunPromptSearchStage();
  std::vector<std::string> RunTypographic();
  std::vector<std::string> RunEval();
  std::vector<std::string> RunCorruptions();
  std::vector<std::string> RunAttacks();
  std::vector<std::string> RunStability();
  std::vector<std::string> RunDedup();
  std::vector<std::string> RunReport();

  const ExperimentConfig& config_;
  fs::path dir_;
  int workers_;
  bool force_;
  RunLedger previous_;
  RunLedger ledger_;
  std::string reference_;
};

std::vector<std::string> Pipeline::SaveSplit(const Dataset& ds, const json& generator) const {
  const fs::path rel = fs::path("datasets") / ds.name();
  SaveDataset(dir_ / rel, ds, generator, DatasetStorage::kRozt);
  return {(rel / "manifest.json").generic_string(), (rel / "images.rozt").generic_string()};
}

std::vector<std::string> Pipeline::RunData() {
  ToyDatasetSpec spec;
  if (!config_.data.classes.empty()) spec.classes = config_.data.classes;
  spec.image_size = config_.data.image_size;
  spec.seed = Seed("data");
  std::vector<std::string> out;
  const auto emit = [&](const std::string& name, int per_class, ToyShift shift) {
    ToyDatasetSpec s = spec;
    s.name = shift == ToyShift::kNone ? name : "test";
    s.n_per_class = per_class;
    s.shift = shift;
    Dataset ds = GenerateToyDataset(s, workers_);
    ds.set_name(name);
    for (auto& f : SaveSplit(ds, ToyGeneratorJson(s))) out.push_back(std::move(f));
  };
  emit("train", config_.data.train_per_class, ToyShift::kNone);
  emit(kStandardDataset, config_.data.test_per_class, ToyShift::kNone);
  for (const auto& shift : config_.data.shifts) {
    emit(ShiftDatasetName(shift), config_.data.test_per_class, ParseToyShift(shift));
  }
  return out;
}

std::vector<std::string> Pipeline::RunModelsStage() {
  const Dataset train = LoadSplit("train");
  fs::create_directories(dir_ / "models");
  std::vector<std::string> out;
  json classifiers = json::array();
  for (const auto& c : config_.classifiers) {
    TrainConfig tc = c.train;
    tc.seed = Seed("models/" + c.name);
    const auto model = TrainClassifier(train, c.arch, tc);
    const std::string file = "models/" + c.name + ".rozm";
    SaveSnapshot(dir_ / file, ClassifierToSnapshot(*model));
    out.push_back(file);
    classifiers.push_back({{"name", c.name},
                           {"file", file},
                           {"baseline", c.baseline},
                           {"snapshot_id", model->snapshot_id()}});
  }
  json index = {{"classifiers", classifiers},
                {"class_names", train.class_names()},
                {"dual_encoder", nullptr}};
  if (config_.dual_encoder) {
    const auto& d = *config_.dual_encoder;
    PretrainSpec pretrain = d.pretrain;
    pretrain.seed = Seed("pretrain");
    TrainConfig tc = d.train;
    tc.seed = Seed("models/dual-encoder");
    const auto encoder = TrainDualEncoder(BuildPretrainingCorpus(train, pretrain), d.arch, tc,
                                          PretrainVocabulary(pretrain, d.prompts));
    const std::string file = "models/dual-encoder.rozm";
    SaveSnapshot(dir_ / file, DualEncoderToSnapshot(*encoder));
    out.push_back(file);
    index["dual_encoder"] = {
        {"file", file}, {"snapshot_id", encoder->snapshot_id()}, {"prompts", d.prompts}};
  }
  WriteJson(dir_ / "models/models.json", index);
  out.emplace_back("models/models.json");
  return out;
}

std::vector<std::string> Pipeline::RunPromptSearchStage() {
  const RunModels models = LoadRunModels(dir_, false);
  PromptSearchConfig cfg = *config_.promptsearch;
  cfg.seed = Seed("promptsearch");
  const auto outcome = RunPromptSearch(models.encoder, LoadSplit("train"), cfg, workers_);
  json j = PromptSetToJson(outcome.prompt_set);
  json steps = json::array();
  for (const auto& s : outcome.search.steps) {
    steps.push_back({{"step", s.step},
                     {"trigger", s.trigger},
                     {"loss_before", s.loss_before},
                     {"loss_after", s.loss_after},
                     {"best", s.best.triggers}});
  }
  j["search_steps"] = steps;
  j["insufficient_candidates"] = outcome.ensemble.insufficient;
  WriteJson(dir_ / "prompts/auto.json", j);
  return {"prompts/auto.json"};
}

std::vector<std::string> Pipeline::RunTypographic() {
  TypographicSpec spec;
  spec.k_coords = config_.typographic->k_coords;
  spec.font_scale = config_.typographic->font_scale;
  spec.seed = Seed("typographic");
  auto result = GenerateTypographicDataset(LoadSplit(kStandardDataset), spec, workers_);
  result.dataset.set_name(kTypographicDataset);
  return SaveSplit(result.dataset, result.generator);
}

std::vector<std::string> Pipeline::RunEval() {
  const RunModels models = Models();
  std::vector<std::pair<Dataset, std::string>> sets;
  sets.emplace_back(LoadSplit(kStandardDataset), "standard");
  for (const auto& shift : config_.data.shifts) {
    sets.emplace_back(LoadSplit(ShiftDatasetName(shift)), "shift");
  }
  const bool typographic = Succeeded("typographic");
  if (typographic) sets.emplace_back(LoadSplit(kTypographicDataset), "shift");

  json records = json::array();
  json typo = json::array();
  for (const auto& name : models.names) {
    const ClassifierModel& model = *models.models.at(name);
    for (const auto& [ds, kind] : sets) {
      const auto predictions = PredictAll(model, ds, workers_);
      ReportRecord r{name,
                     model.snapshot_id(),
                     ds.name(),
                     ds.Identity(),
                     kind,
                     AccuracyFromPredictions(predictions, Labels(ds)),
                     models.baselines.count(name) > 0};
      records.push_back(ReportRecordToJson(r));
      if (ds.name() == kTypographicDataset) {
        std::vector<int> targets;
        for (const auto& ex : ds.examples()) targets.push_back(*ex.target);
        typo.push_back({{"model", name},
                        {"accuracy", r.accuracy},
                        {"success_rate", TargetedSuccessRate(predictions, targets)}});
      }
    }
  }
  WriteJson(dir_ / "results/accuracy.json",
            {{"records", records}, {"typographic", typographic ? typo : json()}});
  return {"results/accuracy.json"};
}

std::vector<std::string> Pipeline::RunCorruptions() {
  const RunModels models = Models();
  const Dataset test = LoadSplit(kStandardDataset);
  const std::size_t m = config_.corruptions->max_images == 0
                            ? test.size()
                            : std::min(test.size(), config_.corruptions->max_images);
  const Dataset subset = test.Subset(SpreadIndices(test.size(), m), "test-corruption-subset");
  std::vector<CorruptionKind> kinds;
  for (const auto& k : config_.corruptions->kinds) kinds.push_back(ParseCorruptionKind(k));
  if (kinds.empty()) kinds = AllCorruptionKinds();

  std::map<std::string, CorruptionGrid> grids;
  for (auto kind : kinds) {
    std::map<std::string, std::vector<double>> row;
    for (int severity = 1; severity <= static_cast<int>(kSeverityLevels); ++severity) {
      const Dataset corrupted =
          CorruptDataset(subset, {kind, severity}, Seed("corruptions"), workers_);
      for (const auto& name : models.names) {
        row[name].push_back(
            EvaluateAccuracy(*models.models.at(name), corrupted, RecordKind::kShift, workers_)
                .accuracy);
      }
    }
    for (const auto& name : models.names) {
      grids[name].emplace_back(CorruptionKindName(kind), row[name]);
    }
  }
  json out = json::array();
  for (const auto& name : models.names) {
    const auto summary = SummarizeCorruptions(grids[name]);
    json grid = json::object();
    json per = json::object();
    for (const auto& [k, accs] : grids[name]) grid[k] = accs;
    for (const auto& [k, acc] : summary.per_corruption) per[k] = acc;
    out.push_back({{"model", name}, {"grid", grid}, {"per_corruption", per},
                   {"overall", summary.overall}});
  }
  WriteJson(dir_ / "results/corruptions.json",
            {{"images", subset.size()}, {"source", subset.Identity()}, {"models", out}});
  return {"results/corruptions.json"};
}

std::vector<std::string> Pipeline::RunAttacks() {
  const RunModels models = Models();
  const Dataset test = LoadSplit(kStandardDataset);
  const Dataset subset =
      test.Subset(SpreadIndices(test.size(), std::min(test.size(), config_.attacks.max_images)),
                  "test-attack-subset");
  std::vector<std::string> out;
  json runs = json::array();
  for (std::size_t ri = 0; ri < config_.attacks.runs.size(); ++ri) {
    const AttackRun& run = config_.attacks.runs[ri];
    AttackConfig cfg = run.config;
    cfg.seed = Seed("attacks", ri);
    const ClassifierModel* substitute =
        run.substitute ? models.models.at(*run.substitute).get() : nullptr;
    for (const auto& name : run.models.empty() ? models.names : run.models) {
      const auto eval = EvaluateUnderAttack(*models.models.at(name), subset, cfg, workers_,
                                            substitute);
      const std::string file = "results/attacks/" + std::to_string(ri) + "-" + name + "-" +
                               AttackMethodName(cfg.method) + "-" + AttackModeName(cfg.mode) +
                               ".jsonl";
      fs::create_directories(dir_ / "results/attacks");
      WriteOutcomeJsonLines((dir_ / file).string(), eval);
      out.push_back(file);
      runs.push_back({{"run", ri},
                      {"model", name},
                      {"method", AttackMethodName(cfg.method)},
                      {"mode", AttackModeName(cfg.mode)},
                      {"access", AttackAccessName(eval.access)},
                      {"epsilon", cfg.epsilon},
                      {"substitute", run.substitute ? json(*run.substitute) : json()},
                      {"summary", AttackSummaryToJson(eval.summary)},
                      {"outcomes", file}});
    }
  }
  WriteJson(dir_ / "results/attacks.json",
            {{"images", subset.size()}, {"source", subset.Identity()}, {"runs", runs}});
  out.emplace_back("results/attacks.json");
  return out;
}

std::vector<std::string> Pipeline::RunStability() {
  const RunModels models = Models();
  const StabilitySection& s = *config_.stability;
  const Dataset test = LoadSplit(kStandardDataset);
  const Dataset subset = test.Subset(
      SpreadIndices(test.size(), std::min(test.size(), s.max_images)), "test-stability-subset");
  std::vector<SequenceKind> kinds;
  for (const auto& k : s.kinds) kinds.push_back(ParseSequenceKind(k));
  if (kinds.empty()) kinds = AllSequenceKinds();
  SequenceSet sequences;
  for (auto kind : kinds) {
    sequences[kind] = BuildPerturbationSequences(subset, kind, s.length, Seed("stability"), workers_);
  }
  const ClassifierModel* reference = s.reference ? models.models.at(*s.reference).get() : nullptr;
  json out = json::array();
  for (const auto& name : models.names) {
    json r = StabilityReportToJson(
        SequenceStability(*models.models.at(name), sequences, reference, workers_));
    if (s.reference) r["reference"] = *s.reference;
    out.push_back({{"model", name}, {"report", r}});
  }
  WriteJson(dir_ / "results/stability.json",
            {{"images", subset.size()}, {"length", s.length}, {"models", out}});
  return {"results/stability.json"};
}

std::vector<std::string> Pipeline::RunDedup() {
  const RunModels models = Models();
  const Dataset train = LoadSplit("train");
  const Dataset test = LoadSplit(kStandardDataset);
  const auto train_index = BuildEmbeddingIndex(*models.encoder, train, workers_);
  const auto test_index = BuildEmbeddingIndex(*models.encoder, test, workers_);
  fs::create_directories(dir_ / "indexes");
  SaveEmbeddingIndex(dir_ / "indexes/train.roze", train_index);
  SaveEmbeddingIndex(dir_ / "indexes/test.roze", test_index);
  const std::string model_name = config_.dedup->model ? *config_.dedup->model : kZeroShotModel;
  const auto reports = OverlapSweepReport(*models.models.at(model_name), test, test_index,
                                          train_index, config_.dedup->thresholds, workers_);
  WriteJson(dir_ / "results/dedup.json", {{"detector", models.encoder->snapshot_id()},
                                          {"model", model_name},
                                          {"reports", OverlapReportsToJson(reports)}});
  WriteFileBytes(dir_ / "results/dedup.csv", OverlapReportsToCsv(reports));
  return {"indexes/train.roze", "indexes/test.roze", "results/dedup.json", "results/dedup.csv"};
}

std::vector<std::string> Pipeline::RunReport() {
  json derived = json::object();
  json runs = json::array();
  std::vector<ReportRecord> records;
  if (Succeeded("eval")) {
    const json acc = ReadJson(dir_ / "results/accuracy.json");
    for (const auto& r : acc.at("records")) records.push_back(ReportRecordFromJson(r));
    for (const auto& r : records) runs.push_back(ReportRecordToJson(r));
    const auto rob = DeriveRobustness(records, kStandardDataset, reference_);
    derived["trends"] = rob.trends;
    derived["effective"] = rob.effective;
    derived["relative"] = rob.relative;
    derived["typographic"] = acc.at("typographic");
  } else {
    derived["trends"] = json::array();
    derived["effective"] = json::array();
    derived["relative"] = json::array();
    derived["typographic"] = nullptr;
  }

  derived["corruptions"] =
      Succeeded("corruptions") ? ReadJson(dir_ / "results/corruptions.json").at("models") : json();

  derived["attacks"] = nullptr;
  derived["attack_table"] = nullptr;
  if (Succeeded("attacks")) {
    const json att = ReadJson(dir_ / "results/attacks.json");
    json list = json::array();
    // (model, method) -> median min distance and budgeted accuracy
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::pair<std::optional<double>, std::optional<double>>> cells;
    for (const auto& r : att.at("runs")) {
      json entry = r;
      entry.erase("outcomes");
      list.push_back(entry);
      const auto key = std::make_pair(r.at("model").get<std::string>(),
                                      r.at("method").get<std::string>());
      if (!cells.count(key)) order.push_back(key);
      auto& cell = cells[key];
      const json& s = r.at("summary");
      if (r.at("mode") == AttackModeName(AttackMode::kMinPerturbation)) {
        if (!s.at("median_min_linf").is_null()) cell.first = s.at("median_min_linf").get<double>();
      } else {
        cell.second = s.at("robust_accuracy").get<double>();
      }
    }
    json table = json::array();
    for (const auto& key : order) {
      const auto& [median, accuracy] = cells[key];
      table.push_back({{"model", key.first},
                       {"method", key.second},
                       {"median_min_linf", median ? json(*median) : json()},
                       {"accuracy", accuracy ? json(*accuracy) : json()},
                       {"cell", FormatAttackCell(median, accuracy)}});
    }
    derived["attacks"] = list;
    derived["attack_table"] = table;
  }

  derived["stability"] =
      Succeeded("stability") ? ReadJson(dir_ / "results/stability.json").at("models") : json();
  derived["dedup"] =
      Succeeded("dedup") ? ReadJson(dir_ / "results/dedup.json") : json();
  derived["promptsearch"] = nullptr;
  if (Succeeded("promptsearch")) {
    const json p = ReadJson(dir_ / "prompts/auto.json");
    derived["promptsearch"] = {{"rendered", p.at("rendered")},
                               {"validation_accuracy", p.at("validation_accuracy")},
                               {"search_steps", p.at("search_steps")},
                               {"insufficient_candidates", p.at("insufficient_candidates")}};
  }

  json stages = json::object();
  bool all_ok = true;
  for (const auto& s : ledger_.stages()) {
    // Reused and freshly run stages report alike so reruns stay byte-identical.
    const std::string st = StageSucceeded(s.status) ? "ok" : StageStatusName(s.status);
    stages[s.name] = st;
    all_ok &= s.status != StageStatus::kFailed && s.status != StageStatus::kBlocked;
  }
  json datasets = json::object();
  for (const auto& r : records) datasets[r.dataset] = r.dataset_id;
  json model_ids = json::object();
  for (const auto& r : records) model_ids[r.model] = r.model_id;

  const json report = {
      {"version", kReportVersion},
      {"runs", runs},
      {"derived", derived},
      {"metadata",
       {{"seed", config_.seed},
        {"config_sha256", ledger_.config_sha256},
        {"config", ResultRelevantConfig(config_)},
        {"standard_dataset", kStandardDataset},
        {"relative_reference", reference_},
        {"datasets", datasets},
        {"models", model_ids},
        {"stages", stages},
        {"complete", all_ok}}}};
  EmitReport(report, ReportFormat::kJson, dir_ / "report.json");
  EmitReport(report, ReportFormat::kCsv, dir_ / "records.csv");
  EmitReport(report, ReportFormat::kScatter, dir_ / "scatter.csv");
  std::string table = "model,method,cell\n";
  if (derived["attack_table"].is_array()) {
    for (const auto& row : derived["attack_table"]) {
      table += row["model"].get<std::string>() + "," + row["method"].get<std::string>() + "," +
               row["cell"].get<std::string>() + "\n";
    }
  }
  WriteFileBytes(dir_ / "attack_table.csv", table);
  return {"report.json", "records.csv", "scatter.csv", "attack_table.csv"};
}

std::vector<Pipeline::Stage> Pipeline::Stages() {
  const auto section = [&](const char* key) {
    return ResultRelevantConfig(config_).value(key, json());
  };
  json models_section = {{"classifiers", section("classifiers")},
                         {"dual_encoder", section("dual_encoder")}};
  json eval_section = {{"shifts", config_.data.shifts}};
  return {
      {"data", {}, {}, true, section("data"), [this] { return RunData(); }},
      {"models", {"data"}, {}, true, models_section, [this] { return RunModelsStage(); }},
      {"promptsearch", {"data", "models"}, {}, config_.promptsearch.has_value(),
       section("promptsearch"), [this] { return RunPromptSearchStage(); }},
      {"typographic", {"data"}, {}, config_.typographic.has_value(), section("typographic"),
       [this] { return RunTypographic(); }},
      {"eval", {"data", "models"}, {"promptsearch", "typographic"}, true, eval_section,
       [this] { return RunEval(); }},
      {"corruptions", {"data", "models"}, {"promptsearch"}, config_.corruptions.has_value(),
       section("corruptions"), [this] { return RunCorruptions(); }},
      {"attacks", {"data", "models"}, {"promptsearch"}, !config_.attacks.runs.empty(),
       section("attacks"), [this] { return RunAttacks(); }},
      {"stability", {"data", "models"}, {"promptsearch"}, config_.stability.has_value(),
       section("stability"), [this] { return RunStability(); }},
      {"dedup", {"data", "models"}, {"promptsearch"}, config_.dedup.has_value(),
       section("dedup"), [this] { return RunDedup(); }},
      {"report",
       {},
       {"eval", "corruptions", "attacks", "stability", "dedup", "promptsearch"},
       true,
       {{"relative_reference", reference_}, {"config_sha256", ledger_.config_sha256}},
       [this] { return RunReport(); }},
  };
}

void Pipeline::Execute(const Stage& stage) {
  StageRecord rec;
  rec.name = stage.name;
  if (!stage.enabled) {
    rec.status = StageStatus::kDisabled;
    ledger_.Record(std::move(rec));
    return;
  }
  for (const auto& dep : stage.required) {
    if (!Succeeded(dep)) {
      rec.status = StageStatus::kBlocked;
      rec.note = "needs stage '" + dep + "'";
      ledger_.Record(std::move(rec));
      return;
    }
  }
  std::vector<std::string> deps = stage.required;
  deps.insert(deps.end(), stage.optional.begin(), stage.optional.end());
  Sha256 fp;
  fp.Update(stage.name).Update("\n").Update(stage.section.dump()).Update("\n").UpdateU64(config_.seed);
  for (const auto& dep : deps) {
    const StageRecord* d = ledger_.Find(dep);
    fp.Update("\n").Update(dep).Update(StageSucceeded(d->status) ? ":ok" : ":absent");
    if (!StageSucceeded(d->status)) continue;
    for (const auto& [file, hash] : d->outputs) {
      rec.inputs[file] = hash;
      fp.Update("\n").Update(file).Update("=").Update(hash);
    }
  }
  rec.fingerprint = fp.HexDigest();

  const StageRecord* prev = previous_.Find(stage.name);
  std::string why;
  if (!force_ && prev != nullptr && CanReuseStage(*prev, rec.fingerprint, dir_, &why)) {
    rec.status = StageStatus::kReused;
    rec.outputs = prev->outputs;
    ledger_.Record(std::move(rec));
    return;
  }
  if (prev != nullptr && !force_) rec.note = "rerun: " + why;

  const auto start = std::chrono::steady_clock::now();
  try {
    rec.outputs = HashOutputs(dir_, stage.run());
    rec.status = StageStatus::kOk;
  } catch (const Error& e) {
    rec.status = StageStatus::kFailed;
    rec.error_code = std::string(ErrorCodeName(e.code()));
    rec.error = e.what();
  } catch (const std::exception& e) {
    rec.status = StageStatus::kFailed;
    rec.error_code = "internal";
    rec.error = e.what();
  }
  rec.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  ledger_.Record(std::move(rec));
}

RunResult Pipeline::Run() {
  fs::create_directories(dir_);
  for (const auto& stage : Stages()) {
    Execute(stage);
    ledger_.Save(dir_ / "ledger.json");
  }
  RunResult result;
  result.run_dir = dir_;
  result.ledger = ledger_;
  if (Succeeded("report")) result.report = ReadJson(dir_ / "report.json");
  return result;
}

}  // namespace

const std::vector<std::string>& StageNames() {
  static const std::vector<std::string> kNames = {
      "data",    "models",      "promptsearch", "typographic", "eval",
      "corruptions", "attacks", "stability",    "dedup",       "report"};
  return kNames;
}

bool RunResult::ok() const {
  for (const auto& s : ledger.stages()) {
    if (s.status == StageStatus::kFailed || s.status == StageStatus::kBlocked) return false;
  }
  return true;
}

RunResult RunExperiment(const ExperimentConfig& config, const RunOptions& options) {
  config.Validate();
  const int workers = options.workers.value_or(config.workers);
  if (workers < 1) throw ConfigError("workers must be at least 1");
  const fs::path dir = options.output_dir.value_or(fs::path(config.output_dir));
  Pipeline pipeline(config, dir, workers, options.force);
  return pipeline.Run();
}

RunModels LoadRunModels(const fs::path& run_dir, bool with_auto_prompts) {
  const json index = ReadJson(run_dir / "models/models.json");
  RunModels out;
  const auto class_names = index.at("class_names").get<std::vector<std::string>>();
  for (const auto& c : index.at("classifiers")) {
    const std::string name = c.at("name").get<std::string>();
    out.names.push_back(name);
    out.models[name] = ClassifierFromSnapshot(LoadSnapshot(run_dir / c.at("file").get<std::string>()));
    if (c.at("baseline").get<bool>()) out.baselines.insert(name);
  }
  const json& enc = index.at("dual_encoder");
  if (!enc.is_null()) {
    out.encoder = DualEncoderFromSnapshot(LoadSnapshot(run_dir / enc.at("file").get<std::string>()));
    const auto prompts = enc.at("prompts").get<std::vector<std::string>>();
    out.names.emplace_back(kZeroShotModel);
    out.models[kZeroShotModel] = SynthesizeZeroShotClassifier(
        out.encoder, class_names, ExpandPromptTemplates(prompts, class_names));
    const fs::path auto_path = run_dir / "prompts/auto.json";
    if (with_auto_prompts && fs::exists(auto_path)) {
      out.names.emplace_back(kZeroShotAutoModel);
      out.models[kZeroShotAutoModel] =
          PromptSetClassifier(out.encoder, LoadPromptSet(auto_path), class_names);
    }
  }
  return out;
}

std::vector<std::size_t> SpreadIndices(std::size_t n, std::size_t m) {
  if (m > n) throw InvalidArgumentError("cannot pick more indices than there are items");
  std::vector<std::size_t> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = i * n / m;
  return out;
}

}  // namespace zsrobust
