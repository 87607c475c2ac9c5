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

#ifndef ZSROBUST_DEDUP_DEDUP_H_
#define ZSROBUST_DEDUP_DEDUP_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsrobust/common/dataset.h"
#include "zsrobust/common/tensor.h"
#include "zsrobust/model/classifier.h"
#include "zsrobust/model/encoder.h"

namespace zsrobust {

// One unit-norm embedding per dataset entry. Rows are stored as f32 values
// so an index round-trips through its file bit-exactly.
struct EmbeddingIndex {
  std::string encoder_id;
  std::string dataset_id;
  Mat vectors;  // rows x dims

  std::size_t rows() const { return static_cast<std::size_t>(vectors.rows()); }
  int dims() const { return static_cast<int>(vectors.cols()); }
  void Validate() const;
  bool operator==(const EmbeddingIndex& other) const;
};

EmbeddingIndex BuildEmbeddingIndex(const ImageEmbedder& encoder, const Dataset& dataset,
                                   int workers = 1);

// "ROZE" | u32 version | encoder id | dataset id | u32 dims | u64 rows | f32 rows
std::string SerializeEmbeddingIndex(const EmbeddingIndex& index);
EmbeddingIndex DeserializeEmbeddingIndex(std::string_view bytes);
void SaveEmbeddingIndex(const std::filesystem::path& path, const EmbeddingIndex& index);
EmbeddingIndex LoadEmbeddingIndex(const std::filesystem::path& path);

double Cosine(const EmbeddingIndex& a, std::size_t row_a, const EmbeddingIndex& b,
              std::size_t row_b);

struct OverlapMatch {
  std::size_t test_index = 0;
  std::size_t train_index = 0;  // best match; lowest index on ties
  double similarity = 0;
};

enum class ScanStrategy {
  kExhaustive,
  // Skips pairs whose Cauchy-Schwarz bound along a pivot direction is below
  // the threshold. Produces the same flags as the exhaustive scan.
  kProjectionPrefilter,
};

// Best train match of every test row, by exhaustive scan.
std::vector<OverlapMatch> BestMatches(const EmbeddingIndex& test, const EmbeddingIndex& train,
                                      int workers = 1);

// Test rows whose max cosine against the train index is >= threshold, in
// test order.
std::vector<OverlapMatch> DetectOverlaps(const EmbeddingIndex& test, const EmbeddingIndex& train,
                                         double threshold,
                                         ScanStrategy strategy = ScanStrategy::kExhaustive,
                                         int workers = 1);

struct OverlapReport {
  double threshold = 0;
  std::vector<OverlapMatch> overlapped;
  double overlap_fraction = 0;
  double accuracy_full = 0;
  std::optional<double> accuracy_cleaned;  // empty when nothing remains
  std::size_t cleaned_count = 0;
};

inline const std::vector<double>& DefaultOverlapThresholds() {
  static const std::vector<double> kGrid = {0.80, 0.85, 0.90, 0.95, 0.99};
  return kGrid;
}

std::vector<OverlapReport> OverlapSweepReport(const ClassifierModel& model,
                                              const Dataset& test_dataset,
                                              const EmbeddingIndex& test_index,
                                              const EmbeddingIndex& train_index,
                                              const std::vector<double>& thresholds,
                                              int workers = 1);

nlohmann::json OverlapReportsToJson(const std::vector<OverlapReport>& reports);
// threshold,overlap_pct,acc_full,acc_clean with "NA" for an empty cleaned set.
std::string OverlapReportsToCsv(const std::vector<OverlapReport>& reports);

}  // namespace zsrobust

#endif  // ZSROBUST_DEDUP_DEDUP_H_
