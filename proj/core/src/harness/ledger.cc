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

#include "zsrobust/harness/ledger.h"

#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/common/hash.h"

namespace zsrobust {

std::string StageStatusName(StageStatus status) {
  switch (status) {
    case StageStatus::kOk:
      return "ok";
    case StageStatus::kReused:
      return "reused";
    case StageStatus::kFailed:
      return "failed";
    case StageStatus::kBlocked:
      return "blocked";
    case StageStatus::kDisabled:
      return "disabled";
  }
  return "unknown";
}

StageStatus ParseStageStatus(const std::string& name) {
  for (auto s : {StageStatus::kOk, StageStatus::kReused, StageStatus::kFailed,
                 StageStatus::kBlocked, StageStatus::kDisabled}) {
    if (StageStatusName(s) == name) return s;
  }
  throw FormatError("unknown stage status '" + name + "'");
}

nlohmann::json StageRecordToJson(const StageRecord& r) {
  nlohmann::json j = {{"name", r.name},
                      {"status", StageStatusName(r.status)},
                      {"fingerprint", r.fingerprint},
                      {"inputs", r.inputs},
                      {"outputs", r.outputs},
                      {"wall_ms", r.wall_ms}};
  if (!r.error.empty()) j["error"] = {{"code", r.error_code}, {"message", r.error}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

StageRecord StageRecordFromJson(const nlohmann::json& j) {
  StageRecord r;
  try {
    r.name = j.at("name").get<std::string>();
    r.status = ParseStageStatus(j.at("status").get<std::string>());
    r.fingerprint = j.value("fingerprint", "");
    r.inputs = j.value("inputs", std::map<std::string, std::string>{});
    r.outputs = j.value("outputs", std::map<std::string, std::string>{});
    r.wall_ms = j.value("wall_ms", 0.0);
    if (j.contains("error")) {
      r.error_code = j["error"].value("code", "");
      r.error = j["error"].value("message", "");
    }
    r.note = j.value("note", "");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("ledger stage record: ") + e.what());
  }
  return r;
}

RunLedger RunLedger::Load(const std::filesystem::path& path) {
  RunLedger ledger;
  if (!std::filesystem::exists(path)) return ledger;
  try {
    const auto j = nlohmann::json::parse(ReadFileBytes(path));
    ledger.seed = j.value("seed", std::uint64_t{0});
    ledger.config_sha256 = j.value("config_sha256", "");
    for (const auto& s : j.at("stages")) ledger.stages_.push_back(StageRecordFromJson(s));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return ledger;
}

void RunLedger::Save(const std::filesystem::path& path) const {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : stages_) stages.push_back(StageRecordToJson(s));
  const nlohmann::json j = {
      {"version", 1}, {"seed", seed}, {"config_sha256", config_sha256}, {"stages", stages}};
  WriteFileBytes(path, j.dump(2) + "\n");
}

const StageRecord* RunLedger::Find(const std::string& name) const {
  for (const auto& s : stages_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void RunLedger::Record(StageRecord record) {
  for (auto& s : stages_) {
    if (s.name == record.name) {
      s = std::move(record);
      return;
    }
  }
  stages_.push_back(std::move(record));
}

bool CanReuseStage(const StageRecord& previous, const std::string& fingerprint,
                   const std::filesystem::path& run_dir, std::string* why) {
  const auto fail = [&](std::string reason) {
    if (why != nullptr) *why = std::move(reason);
    return false;
  };
  if (!StageSucceeded(previous.status)) return fail("previous run did not finish");
  if (previous.fingerprint != fingerprint) return fail("inputs or config changed");
  for (const auto& [file, hash] : previous.outputs) {
    const auto path = run_dir / file;
    if (!std::filesystem::exists(path)) return fail("output " + file + " was deleted");
    if (Sha256File(path) != hash) return fail("output " + file + " was modified");
  }
  return true;
}

std::map<std::string, std::string> HashOutputs(const std::filesystem::path& run_dir,
                                               const std::vector<std::string>& files) {
  std::map<std::string, std::string> out;
  for (const auto& f : files) out[f] = Sha256File(run_dir / f);
  return out;
}

}  // namespace zsrobust
