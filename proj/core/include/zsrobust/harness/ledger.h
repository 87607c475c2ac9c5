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

#ifndef ZSROBUST_HARNESS_LEDGER_H_
#define ZSROBUST_HARNESS_LEDGER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace zsrobust {

enum class StageStatus {
  kOk,
  kReused,    // fingerprint and outputs unchanged since a previous run
  kFailed,
  kBlocked,   // a required upstream stage failed
  kDisabled,  // not requested by the config
};

std::string StageStatusName(StageStatus status);
StageStatus ParseStageStatus(const std::string& name);
inline bool StageSucceeded(StageStatus s) {
  return s == StageStatus::kOk || s == StageStatus::kReused;
}

struct StageRecord {
  std::string name;
  StageStatus status = StageStatus::kDisabled;
  // Hash over the stage's config section, the master seed and the hashes of
  // its upstream outputs.
  std::string fingerprint;
  std::map<std::string, std::string> inputs;   // upstream file -> sha256
  std::map<std::string, std::string> outputs;  // file relative to the run dir -> sha256
  double wall_ms = 0;
  std::string error_code;
  std::string error;
  std::string note;
};

// Per-stage record of a run, kept next to its outputs. Wall-clock times
// live here and never in the report.
class RunLedger {
 public:
  static RunLedger Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  const StageRecord* Find(const std::string& name) const;
  void Record(StageRecord record);

  std::uint64_t seed = 0;
  std::string config_sha256;
  const std::vector<StageRecord>& stages() const { return stages_; }

 private:
  std::vector<StageRecord> stages_;
};

nlohmann::json StageRecordToJson(const StageRecord& record);
StageRecord StageRecordFromJson(const nlohmann::json& j);

// True when `previous` finished with `fingerprint` and every output it
// listed still exists under `run_dir` with the same hash; otherwise `why`
// says what changed.
bool CanReuseStage(const StageRecord& previous, const std::string& fingerprint,
                   const std::filesystem::path& run_dir, std::string* why);

std::map<std::string, std::string> HashOutputs(const std::filesystem::path& run_dir,
                                               const std::vector<std::string>& files);

}  // namespace zsrobust

#endif  // ZSROBUST_HARNESS_LEDGER_H_
