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

// Command line front end. Exit codes: 0 ok, 2 configuration error,
// 3 stage failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "zsrobust/attacks/evaluate.h"
#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/dataset_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/dedup/dedup.h"
#include "zsrobust/harness/config.h"
#include "zsrobust/harness/pipeline.h"
#include "zsrobust/harness/pretrain.h"
#include "zsrobust/harness/report.h"
#include "zsrobust/metrics/accuracy.h"
#include "zsrobust/model/bridge.h"
#include "zsrobust/model/snapshot.h"
#include "zsrobust/model/zero_shot.h"
#include "zsrobust/promptsearch/search.h"
#include "zsrobust/shiftgen/corruptions.h"
#include "zsrobust/shiftgen/toy.h"
#include "zsrobust/shiftgen/typographic.h"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace zsrobust;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFailure = 3;

constexpr char kBridgePrefix[] = "bridge:";

struct Globals {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string config;
  std::string out;
};

std::uint64_t SeedOr(const Globals& g, std::uint64_t fallback = 0) {
  return g.seed.value_or(fallback);
}

const std::string& RequireOut(const Globals& g) {
  if (g.out.empty()) throw ConfigError("--out is required for this command");
  return g.out;
}

json ReadJsonFile(const std::string& path) {
  try {
    return json::parse(ReadFileBytes(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

void WriteOutput(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    WriteFileBytes(path, j.dump(2) + "\n");
  }
}

// A classifier from a snapshot file or a bridge endpoint ("bridge:<cmd>"
// or "bridge:tcp:host:port"). Dual-encoder snapshots become zero-shot
// classifiers over `class_names` using `prompts`.
std::shared_ptr<const ClassifierModel> OpenModel(const std::string& spec,
                                                 const std::vector<std::string>& class_names,
                                                 const std::vector<std::string>& prompts) {
  if (spec.rfind(kBridgePrefix, 0) == 0) {
    ExternalModel ext = ConnectExternalModel(spec.substr(sizeof(kBridgePrefix) - 1));
    if (ext.classifier) return ext.classifier;
    if (!ext.encoder) throw UnsupportedCapabilityError("bridge peer offers neither logits nor embeddings");
    return SynthesizeZeroShotClassifier(ext.encoder, class_names,
                                        ExpandPromptTemplates(prompts, class_names));
  }
  const ModelSnapshot snap = LoadSnapshot(spec);
  if (SnapshotKind(snap) == "classifier") return ClassifierFromSnapshot(snap);
  std::shared_ptr<const DualEncoder> enc = DualEncoderFromSnapshot(snap);
  return SynthesizeZeroShotClassifier(enc, class_names, ExpandPromptTemplates(prompts, class_names));
}

std::shared_ptr<const ImageEmbedder> OpenEmbedder(const std::string& spec) {
  if (spec.rfind(kBridgePrefix, 0) == 0) {
    ExternalModel ext = ConnectExternalModel(spec.substr(sizeof(kBridgePrefix) - 1));
    if (!ext.encoder) throw UnsupportedCapabilityError("bridge peer offers no embeddings");
    return ext.encoder;
  }
  return DualEncoderFromSnapshot(LoadSnapshot(spec));
}

DatasetStorage ParseStorage(const std::string& s) {
  if (s == "png") return DatasetStorage::kPng;
  if (s == "rozt") return DatasetStorage::kRozt;
  throw ConfigError("unknown dataset format '" + s + "' (png or rozt)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robustness evaluation toolkit for zero-shot and supervised image classifiers"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "JSON config for the command");
  app.add_option("--out", g.out, "Output path");

  // gen-toy
  auto* gen = app.add_subcommand("gen-toy", "Generate a toy shapes dataset");
  std::vector<std::string> gen_classes;
  int gen_n = 50, gen_size = 32;
  std::string gen_shift = "none", gen_name = "toy", gen_format = "png";
  gen->add_option("--classes", gen_classes, "Class names (default: all toy classes)");
  gen->add_option("--n-per-class", gen_n);
  gen->add_option("--size", gen_size);
  gen->add_option("--shift", gen_shift, "none, background or texture");
  gen->add_option("--name", gen_name);
  gen->add_option("--format", gen_format, "png or rozt");

  // typo-gen
  auto* typo = app.add_subcommand("typo-gen", "Render typographic attacks onto a dataset");
  std::string typo_in;
  int typo_k = kImageNetStyleCoords, typo_scale = 0;
  std::string typo_format = "png";
  typo->add_option("--input", typo_in)->required();
  typo->add_option("--k-coords", typo_k);
  typo->add_option("--font-scale", typo_scale, "0 picks a scale from the image height");
  typo->add_option("--format", typo_format);

  // corrupt
  auto* cor = app.add_subcommand("corrupt", "Apply a corruption at one severity");
  std::string cor_in, cor_kind, cor_format = "png";
  int cor_severity = 1;
  cor->add_option("--input", cor_in)->required();
  cor->add_option("--kind", cor_kind)->required();
  cor->add_option("--severity", cor_severity)->check(CLI::Range(1, 5));
  cor->add_option("--format", cor_format);

  // train
  auto* train = app.add_subcommand("train", "Train a classifier or a dual encoder");
  std::string train_data, train_kind = "classifier";
  std::vector<std::string> train_prompts = {"a photo of a {}"};
  ArchSpec arch;
  std::string arch_kind = "mlp";
  train->add_option("--data", train_data)->required();
  train->add_option("--kind", train_kind, "classifier or dual-encoder");
  train->add_option("--arch", arch_kind, "linear or mlp");
  train->add_option("--patch", arch.patch);
  train->add_option("--prompts", train_prompts, "Zero-shot templates added to the vocabulary");

  // promptsearch
  auto* ps = app.add_subcommand("promptsearch", "Search trigger-token prompts for a dual encoder");
  std::string ps_encoder, ps_data;
  ps->add_option("--encoder", ps_encoder)->required();
  ps->add_option("--data", ps_data)->required();

  // attack
  auto* att = app.add_subcommand("attack", "Attack a model on a dataset");
  std::string att_model, att_data, att_sub, att_method = "fgsm", att_mode = "budgeted";
  std::optional<double> att_eps;
  std::size_t att_max = 0;
  std::vector<std::string> att_prompts = {"a photo of a {}"};
  att->add_option("--model", att_model, "Snapshot file or bridge:<endpoint>")->required();
  att->add_option("--data", att_data)->required();
  att->add_option("--substitute", att_sub, "Substitute model for transfer attacks");
  att->add_option("--method", att_method);
  att->add_option("--mode", att_mode, "budgeted or min");
  att->add_option("--epsilon", att_eps);
  att->add_option("--max-images", att_max, "0 attacks every image");
  att->add_option("--prompts", att_prompts);

  // dedup
  auto* dd = app.add_subcommand("dedup", "Measure train/test overlap and re-evaluate");
  std::string dd_encoder, dd_train, dd_test, dd_model;
  std::vector<double> dd_thresholds = DefaultOverlapThresholds();
  std::vector<std::string> dd_prompts = {"a photo of a {}"};
  dd->add_option("--encoder", dd_encoder)->required();
  dd->add_option("--train", dd_train)->required();
  dd->add_option("--test", dd_test)->required();
  dd->add_option("--model", dd_model, "Classifier to re-evaluate (default: the encoder zero-shot)");
  dd->add_option("--thresholds", dd_thresholds);
  dd->add_option("--prompts", dd_prompts);

  // eval
  auto* ev = app.add_subcommand("eval", "Accuracy of a model on a dataset");
  std::string ev_model, ev_data;
  std::vector<std::string> ev_prompts = {"a photo of a {}"};
  ev->add_option("--model", ev_model)->required();
  ev->add_option("--data", ev_data)->required();
  ev->add_option("--prompts", ev_prompts);

  // report
  auto* rep = app.add_subcommand("report", "Run an experiment config, or re-emit a finished report");
  std::string rep_from, rep_format = "json";
  bool rep_force = false, rep_default = false;
  rep->add_option("--from", rep_from, "Finished run directory to re-emit from");
  rep->add_option("--format", rep_format, "json, csv or scatter");
  rep->add_flag("--force", rep_force, "Rerun every stage");
  rep->add_flag("--print-default-config", rep_default, "Print the default experiment config");

  // bridge-check
  auto* bc = app.add_subcommand("bridge-check", "Handshake with a model bridge peer");
  std::string bc_endpoint;
  int bc_timeout = 30000;
  bc->add_option("--endpoint", bc_endpoint, "Command line or tcp:host:port")->required();
  bc->add_option("--timeout-ms", bc_timeout);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) {
      ToyDatasetSpec spec;
      if (!gen_classes.empty()) spec.classes = gen_classes;
      spec.n_per_class = gen_n;
      spec.image_size = gen_size;
      spec.shift = ParseToyShift(gen_shift);
      spec.seed = SeedOr(g);
      spec.name = gen_name;
      const Dataset ds = GenerateToyDataset(spec, g.workers);
      SaveDataset(RequireOut(g), ds, ToyGeneratorJson(spec), ParseStorage(gen_format));
      std::cout << ds.Identity() << "\n";
    } else if (*typo) {
      TypographicSpec spec;
      spec.k_coords = typo_k;
      spec.font_scale = typo_scale;
      spec.seed = SeedOr(g);
      const auto result = GenerateTypographicDataset(LoadDataset(typo_in), spec, g.workers);
      SaveDataset(RequireOut(g), result.dataset, result.generator, ParseStorage(typo_format));
      std::cout << result.dataset.Identity() << "\n";
    } else if (*cor) {
      const Dataset src = LoadDataset(cor_in);
      const CorruptionSpec spec{ParseCorruptionKind(cor_kind), cor_severity};
      const Dataset ds = CorruptDataset(src, spec, SeedOr(g), g.workers);
      SaveDataset(RequireOut(g), ds, CorruptionGeneratorJson(spec, SeedOr(g), src.Identity()),
                  ParseStorage(cor_format));
      std::cout << ds.Identity() << "\n";
    } else if (*train) {
      const Dataset ds = LoadDataset(train_data);
      if (arch_kind == "linear") {
        arch.kind = ArchKind::kLinear;
      } else if (arch_kind != "mlp") {
        throw ConfigError("unknown architecture '" + arch_kind + "'");
      }
      TrainConfig tc;
      json extra = json::object();
      if (!g.config.empty()) {
        json j = ReadJsonFile(g.config);
        if (j.contains("pretrain")) {
          extra = j["pretrain"];
          j.erase("pretrain");
        }
        tc = TrainConfigFromJson(j);
      }
      if (g.seed) tc.seed = *g.seed;
      if (train_kind == "classifier") {
        const auto model = TrainClassifier(ds, arch, tc);
        SaveSnapshot(RequireOut(g), ClassifierToSnapshot(*model));
        std::cout << model->snapshot_id() << "\n";
      } else if (train_kind == "dual-encoder") {
        PretrainSpec pre = extra.empty() ? PretrainSpec{} : PretrainSpecFromJson(extra);
        pre.seed = tc.seed;
        const auto enc = TrainDualEncoder(BuildPretrainingCorpus(ds, pre), arch, tc,
                                          PretrainVocabulary(pre, train_prompts));
        SaveSnapshot(RequireOut(g), DualEncoderToSnapshot(*enc));
        std::cout << enc->snapshot_id() << "\n";
      } else {
        throw ConfigError("unknown model kind '" + train_kind + "'");
      }
    } else if (*ps) {
      PromptSearchConfig cfg;
      if (!g.config.empty()) cfg = PromptSearchConfigFromJson(ReadJsonFile(g.config));
      if (g.seed) cfg.seed = *g.seed;
      const auto outcome = RunPromptSearch(DualEncoderFromSnapshot(LoadSnapshot(ps_encoder)),
                                           LoadDataset(ps_data), cfg, g.workers);
      if (outcome.ensemble.insufficient) {
        std::cerr << "warning: fewer distinct prompts than the requested ensemble size\n";
      }
      WriteOutput(g.out, PromptSetToJson(outcome.prompt_set));
    } else if (*att) {
      const Dataset full = LoadDataset(att_data);
      const Dataset ds =
          att_max == 0 || att_max >= full.size()
              ? full
              : full.Subset(SpreadIndices(full.size(), att_max), full.name() + "-subset");
      AttackConfig cfg;
      if (!g.config.empty()) {
        cfg = AttackConfigFromJson(ReadJsonFile(g.config));
      } else {
        cfg.method = ParseAttackMethod(att_method);
        cfg.mode = ParseAttackMode(att_mode);
        if (att_eps) cfg.epsilon = *att_eps;
      }
      if (g.seed) cfg.seed = *g.seed;
      const auto target = OpenModel(att_model, ds.class_names(), att_prompts);
      std::shared_ptr<const ClassifierModel> sub;
      if (!att_sub.empty()) sub = OpenModel(att_sub, ds.class_names(), att_prompts);
      const auto eval = EvaluateUnderAttack(*target, ds, cfg, g.workers, sub.get());
      if (!g.out.empty()) WriteOutcomeJsonLines(g.out, eval);
      json summary = AttackSummaryToJson(eval.summary);
      summary["method"] = AttackMethodName(cfg.method);
      summary["mode"] = AttackModeName(cfg.mode);
      summary["access"] = AttackAccessName(eval.access);
      std::cout << summary.dump(2) << "\n";
    } else if (*dd) {
      const Dataset train_ds = LoadDataset(dd_train);
      const Dataset test_ds = LoadDataset(dd_test);
      const auto encoder = OpenEmbedder(dd_encoder);
      const auto model = OpenModel(dd_model.empty() ? dd_encoder : dd_model,
                                   test_ds.class_names(), dd_prompts);
      const auto train_index = BuildEmbeddingIndex(*encoder, train_ds, g.workers);
      const auto test_index = BuildEmbeddingIndex(*encoder, test_ds, g.workers);
      const auto reports = OverlapSweepReport(*model, test_ds, test_index, train_index,
                                              dd_thresholds, g.workers);
      const fs::path out = RequireOut(g);
      fs::create_directories(out);
      SaveEmbeddingIndex(out / "train.roze", train_index);
      SaveEmbeddingIndex(out / "test.roze", test_index);
      WriteFileBytes(out / "dedup.json", OverlapReportsToJson(reports).dump(2) + "\n");
      WriteFileBytes(out / "dedup.csv", OverlapReportsToCsv(reports));
      std::cout << OverlapReportsToCsv(reports);
    } else if (*ev) {
      const Dataset ds = LoadDataset(ev_data);
      const auto model = OpenModel(ev_model, ds.class_names(), ev_prompts);
      const EvalRecord rec =
          EvaluateAccuracy(*model, ds, RecordKind::kStandard, g.workers, model->snapshot_id());
      WriteOutput(g.out, EvalRecordToJson(rec));
    } else if (*rep) {
      if (rep_default) {
        WriteOutput(g.out, ExperimentConfigToJson(DefaultExperimentConfig()));
        return kExitOk;
      }
      const ReportFormat format = ParseReportFormat(rep_format);
      if (!rep_from.empty()) {
        const json report = ReadJsonFile((fs::path(rep_from) / "report.json").string());
        EmitReport(report, format, RequireOut(g));
        return kExitOk;
      }
      if (g.config.empty()) throw ConfigError("report needs --config or --from");
      ExperimentConfig cfg = LoadExperimentConfig(g.config);
      if (g.seed) cfg.seed = *g.seed;
      RunOptions opts;
      if (!g.out.empty()) opts.output_dir = g.out;
      opts.workers = g.workers;
      opts.force = rep_force;
      const RunResult result = RunExperiment(cfg, opts);
      for (const auto& s : result.ledger.stages()) {
        std::cerr << s.name << ": " << StageStatusName(s.status);
        if (!s.error.empty()) std::cerr << " (" << s.error_code << ": " << s.error << ")";
        std::cerr << "\n";
      }
      if (format != ReportFormat::kJson && !result.report.is_null()) {
        const char* name = format == ReportFormat::kCsv ? "records.csv" : "scatter.csv";
        std::cout << (result.run_dir / name).string() << "\n";
      } else {
        std::cout << (result.run_dir / "report.json").string() << "\n";
      }
      return result.ok() ? kExitOk : kExitFailure;
    } else if (*bc) {
      BridgeOptions opts;
      opts.timeout_ms = bc_timeout;
      const ExternalModel ext = ConnectExternalModel(bc_endpoint, opts);
      const BridgeInfo& i = ext.info;
      json j = {{"protocol_version", i.protocol_version},
                {"classes", i.classes},
                {"has_input_gradient", i.has_input_gradient},
                {"has_embeddings", i.has_embeddings},
                {"input", {i.input.channels, i.input.height, i.input.width}},
                {"snapshot_id", i.snapshot_id}};
      if (i.has_embeddings) j["embed_dim"] = i.embed_dim;
      if (ext.classifier) {
        const Image probe(i.input.height, i.input.width, 0.5);
        const Vec logits = ForwardLogits(*ext.classifier, probe);
        j["probe_logits"] = std::vector<double>(logits.data(), logits.data() + logits.size());
      }
      WriteOutput(g.out, j);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << ErrorCodeName(e.code()) << " error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
