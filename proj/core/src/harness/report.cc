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

#include "zsrobust/harness/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/metrics/trend.h"

namespace zsrobust {
namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void CheckCsvField(const std::string& s) {
  if (s.find_first_of(",\n\"") != std::string::npos) {
    throw InvalidArgumentError("value '" + s + "' cannot be written to CSV");
  }
}

}  // namespace

nlohmann::json ReportRecordToJson(const ReportRecord& r) {
  return {{"model", r.model},       {"model_id", r.model_id}, {"dataset", r.dataset},
          {"dataset_id", r.dataset_id}, {"kind", r.kind},     {"accuracy", r.accuracy},
          {"baseline", r.baseline}};
}

ReportRecord ReportRecordFromJson(const nlohmann::json& j) {
  ReportRecord r;
  try {
    r.model = j.at("model").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.accuracy = j.at("accuracy").get<double>();
    r.baseline = j.at("baseline").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report record: ") + e.what());
  }
  return r;
}

RobustnessDerivation DeriveRobustness(const std::vector<ReportRecord>& records,
                                      const std::string& standard_dataset,
                                      const std::optional<std::string>& reference) {
  std::map<std::string, const ReportRecord*> standard;
  std::map<std::string, std::map<std::string, const ReportRecord*>> shifted;  // dataset -> model
  std::vector<std::string> dataset_order;
  std::vector<std::string> model_order;
  for (const auto& r : records) {
    if (std::find(model_order.begin(), model_order.end(), r.model) == model_order.end()) {
      model_order.push_back(r.model);
    }
    if (r.dataset == standard_dataset) {
      standard[r.model] = &r;
    } else {
      if (!shifted.count(r.dataset)) dataset_order.push_back(r.dataset);
      shifted[r.dataset][r.model] = &r;
    }
  }

  RobustnessDerivation d;
  for (const auto& ds : dataset_order) {
    const auto& by_model = shifted[ds];
    std::vector<std::pair<double, double>> points;
    std::vector<std::string> sources;
    for (const auto& m : model_order) {
      const auto it = by_model.find(m);
      if (it == by_model.end() || !it->second->baseline || !standard.count(m)) continue;
      points.emplace_back(standard[m]->accuracy, it->second->accuracy);
      sources.push_back(m);
    }
    std::optional<BaselineTrend> trend;
    try {
      trend = FitBaselineTrend(points);
      nlohmann::json tj = BaselineTrendToJson(*trend);
      tj["dataset"] = ds;
      tj["source_models"] = sources;
      d.trends.push_back(std::move(tj));
    } catch (const Error& e) {
      d.trends.push_back({{"dataset", ds}, {"source_models", sources}, {"error", e.what()}});
    }
    for (const auto& m : model_order) {
      const auto it = by_model.find(m);
      if (it == by_model.end() || !standard.count(m)) continue;
      if (trend) {
        d.effective.push_back(
            {{"model", m},
             {"dataset", ds},
             {"value", 100.0 * (it->second->accuracy - (*trend)(standard[m]->accuracy))}});
      }
      if (reference && m != *reference && by_model.count(*reference)) {
        d.relative.push_back(
            {{"model", m},
             {"reference", *reference},
             {"dataset", ds},
             {"value", 100.0 * RelativeRobustness(it->second->accuracy,
                                                  by_model.at(*reference)->accuracy)}});
      }
    }
  }
  return d;
}

std::string RecordsToCsv(const std::vector<ReportRecord>& records) {
  std::ostringstream os;
  os << "model,model_id,dataset,dataset_id,kind,baseline,accuracy\n";
  for (const auto& r : records) {
    for (const auto* s : {&r.model, &r.model_id, &r.dataset, &r.dataset_id, &r.kind}) {
      CheckCsvField(*s);
    }
    os << r.model << ',' << r.model_id << ',' << r.dataset << ',' << r.dataset_id << ','
       << r.kind << ',' << (r.baseline ? 1 : 0) << ',' << Num(r.accuracy) << '\n';
  }
  return os.str();
}

std::vector<ReportRecord> RecordsFromCsv(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line) || line != "model,model_id,dataset,dataset_id,kind,baseline,accuracy") {
    throw FormatError("records CSV has an unexpected header");
  }
  std::vector<ReportRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 7) throw FormatError("records CSV row has " + std::to_string(f.size()) + " fields");
    ReportRecord r{f[0], f[1], f[2], f[3], f[4], 0, f[5] == "1"};
    try {
      r.accuracy = std::stod(f[6]);
    } catch (const std::exception&) {
      throw FormatError("bad accuracy '" + f[6] + "' in records CSV");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string ScatterCsv(const std::vector<ReportRecord>& records, const nlohmann::json& trends,
                       const std::string& standard_dataset) {
  std::map<std::string, double> acc1;
  for (const auto& r : records) {
    if (r.dataset == standard_dataset) acc1[r.model] = r.accuracy;
  }
  std::ostringstream os;
  os << "series,model,dataset,acc1,acc2,probit_acc1,probit_acc2\n";
  const auto row = [&](const std::string& series, const std::string& model,
                       const std::string& ds, double a1, double a2) {
    os << series << ',' << model << ',' << ds << ',' << Num(a1) << ',' << Num(a2) << ','
       << Num(Probit(a1)) << ',' << Num(Probit(a2)) << '\n';
  };
  for (const auto& r : records) {
    if (r.dataset == standard_dataset || !acc1.count(r.model)) continue;
    row(r.baseline ? "baseline" : "model", r.model, r.dataset, acc1[r.model], r.accuracy);
  }
  for (const auto& t : trends) {
    if (t.contains("error")) continue;
    BaselineTrend trend;
    trend.slope = t.at("slope").get<double>();
    trend.intercept = t.at("intercept").get<double>();
    const std::string ds = t.at("dataset").get<std::string>();
    std::set<double> xs;
    for (int i = 1; i < 100; ++i) xs.insert(i / 100.0);
    for (const auto& r : records) {
      if (r.dataset == ds && r.baseline && acc1.count(r.model)) xs.insert(acc1[r.model]);
    }
    for (double x : xs) row("trend", "", ds, x, trend(x));
  }
  for (int i = 1; i < 100; ++i) row("ideal", "", "", i / 100.0, i / 100.0);
  return os.str();
}

std::string FormatAttackCell(const std::optional<double>& median_linf,
                             const std::optional<double>& accuracy) {
  char left[32] = "-";
  char right[32] = "-";
  if (median_linf) std::snprintf(left, sizeof(left), "%.3f", *median_linf);
  if (accuracy) std::snprintf(right, sizeof(right), "%.2f", 100.0 * *accuracy);
  return std::string(left) + " / " + right;
}

ReportFormat ParseReportFormat(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "scatter") return ReportFormat::kScatter;
  throw ConfigError("unknown report format '" + name + "' (json, csv or scatter)");
}

std::vector<ReportRecord> ReportRecords(const nlohmann::json& report) {
  std::vector<ReportRecord> out;
  for (const auto& r : report.at("runs")) out.push_back(ReportRecordFromJson(r));
  return out;
}

void EmitReport(const nlohmann::json& report, ReportFormat format,
                const std::filesystem::path& path) {
  if (!report.is_object() || !report.contains("runs") || !report.contains("derived")) {
    throw InvalidArgumentError("report is incomplete");
  }
  switch (format) {
    case ReportFormat::kJson:
      WriteFileBytes(path, report.dump(2) + "\n");
      return;
    case ReportFormat::kCsv:
      WriteFileBytes(path, RecordsToCsv(ReportRecords(report)));
      return;
    case ReportFormat::kScatter:
      WriteFileBytes(path, ScatterCsv(ReportRecords(report), report["derived"].at("trends"),
                                      report["metadata"].at("standard_dataset").get<std::string>()));
      return;
  }
}

}  // namespace zsrobust
