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

#ifndef ZSROBUST_HARNESS_REPORT_H_
#define ZSROBUST_HARNESS_REPORT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace zsrobust {

inline constexpr int kReportVersion = 1;

// One accuracy measurement as it appears in a report's "runs" list.
struct ReportRecord {
  std::string model;
  std::string model_id;
  std::string dataset;
  std::string dataset_id;
  std::string kind;  // standard | shift
  double accuracy = 0;
  bool baseline = false;
};

nlohmann::json ReportRecordToJson(const ReportRecord& record);
ReportRecord ReportRecordFromJson(const nlohmann::json& j);

struct RobustnessDerivation {
  nlohmann::json trends = nlohmann::json::array();     // per shift dataset
  nlohmann::json effective = nlohmann::json::array();  // {model, dataset, value}
  nlohmann::json relative = nlohmann::json::array();   // {model, reference, dataset, value}
};

// Fits one probit trend per shift dataset from the baseline models, then
// effective robustness of every model and relative robustness against
// `reference`, both in percentage points. Datasets whose trend cannot be
// fitted carry an "error" entry instead.
RobustnessDerivation DeriveRobustness(const std::vector<ReportRecord>& records,
                                      const std::string& standard_dataset,
                                      const std::optional<std::string>& reference);

// Flat records table; values are written with round-trip precision so the
// derived metrics can be recomputed from the file alone.
std::string RecordsToCsv(const std::vector<ReportRecord>& records);
std::vector<ReportRecord> RecordsFromCsv(const std::string& csv);

// acc1/acc2 pairs on raw and probit axes, trend samples and the y = x line.
std::string ScatterCsv(const std::vector<ReportRecord>& records, const nlohmann::json& trends,
                       const std::string& standard_dataset);

// "median / accuracy" cell: median minimum l-inf distance to three decimals
// and accuracy at the budget in percent to two; "-" for a missing half.
std::string FormatAttackCell(const std::optional<double>& median_linf,
                             const std::optional<double>& accuracy);

enum class ReportFormat { kJson, kCsv, kScatter };
ReportFormat ParseReportFormat(const std::string& name);

// Writes `report` (as built by the harness) in the requested format.
void EmitReport(const nlohmann::json& report, ReportFormat format,
                const std::filesystem::path& path);

std::vector<ReportRecord> ReportRecords(const nlohmann::json& report);

}  // namespace zsrobust

#endif  // ZSROBUST_HARNESS_REPORT_H_
