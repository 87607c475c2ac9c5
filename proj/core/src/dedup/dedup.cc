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

#include "zsrobust/dedup/dedup.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "zsrobust/common/binary_io.h"
#include "zsrobust/common/error.h"
#include "zsrobust/common/parallel.h"
#include "zsrobust/metrics/accuracy.h"

namespace zsrobust {
namespace {

constexpr char kMagic[] = "ROZE";
constexpr std::uint32_t kVersion = 1;
constexpr double kNormTolerance = 1e-6;
// Keeps the prefilter conservative against rounding in the bound itself.
constexpr double kBoundSlack = 1e-9;

void CheckCompatible(const EmbeddingIndex& test, const EmbeddingIndex& train) {
  if (test.encoder_id != train.encoder_id) {
    throw InvalidArgumentError("embedding indexes come from different encoders: " +
                               test.encoder_id + " vs " + train.encoder_id);
  }
  if (test.dims() != train.dims()) {
    throw ShapeMismatchError("embedding indexes have different dimensions");
  }
}

struct Projection {
  double along = 0;     // component on the pivot
  double residual = 0;  // norm of the orthogonal remainder
};

std::vector<Projection> Project(const EmbeddingIndex& index, const Vec& pivot) {
  std::vector<Projection> out(index.rows());
  for (std::size_t i = 0; i < index.rows(); ++i) {
    const auto row = index.vectors.row(static_cast<Eigen::Index>(i));
    const double p = row.dot(pivot);
    out[i] = {p, std::sqrt(std::max(0.0, row.squaredNorm() - p * p))};
  }
  return out;
}

}  // namespace

void EmbeddingIndex::Validate() const {
  if (vectors.rows() == 0 || vectors.cols() == 0) throw InvalidArgumentError("empty embedding index");
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    const double n = vectors.row(i).norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
      throw NumericError("embedding row " + std::to_string(i) + " is not unit norm");
    }
  }
}

bool EmbeddingIndex::operator==(const EmbeddingIndex& other) const {
  return encoder_id == other.encoder_id && dataset_id == other.dataset_id &&
         vectors.rows() == other.vectors.rows() && vectors.cols() == other.vectors.cols() &&
         vectors == other.vectors;
}

EmbeddingIndex BuildEmbeddingIndex(const ImageEmbedder& encoder, const Dataset& dataset,
                                   int workers) {
  if (dataset.empty()) throw InvalidArgumentError("cannot index an empty dataset");
  const int d = encoder.embed_dim();
  if (d <= 0) throw InvalidArgumentError("encoder reports no embedding dimension");
  EmbeddingIndex index;
  index.encoder_id = encoder.snapshot_id();
  index.dataset_id = dataset.Identity();
  index.vectors = Mat::Zero(static_cast<Eigen::Index>(dataset.size()), d);
  ParallelFor(dataset.size(), workers, [&](std::size_t i) {
    Vec e = CheckedEmbedImage(encoder, dataset[i].image);
    if (e.size() != d) {
      throw ShapeMismatchError("embedding dimension drifted at image " + std::to_string(i) +
                               ": " + std::to_string(e.size()) + " vs " + std::to_string(d));
    }
    e.normalize();
    for (Eigen::Index k = 0; k < d; ++k) {
      index.vectors(static_cast<Eigen::Index>(i), k) = static_cast<float>(e[k]);
    }
  });
  index.Validate();
  return index;
}

std::string SerializeEmbeddingIndex(const EmbeddingIndex& index) {
  index.Validate();
  ByteWriter w;
  w.Bytes(std::string_view(kMagic, 4));
  w.U32(kVersion);
  w.String(index.encoder_id);
  w.String(index.dataset_id);
  w.U32(static_cast<std::uint32_t>(index.dims()));
  w.U64(index.rows());
  for (Eigen::Index i = 0; i < index.vectors.rows(); ++i) {
    for (Eigen::Index k = 0; k < index.vectors.cols(); ++k) w.F32(index.vectors(i, k));
  }
  return w.Take();
}

EmbeddingIndex DeserializeEmbeddingIndex(std::string_view bytes) {
  ByteReader r(bytes, "embedding index");
  if (r.Bytes(4) != std::string_view(kMagic, 4)) throw FormatError("not an embedding index file");
  const std::uint32_t version = r.U32();
  if (version != kVersion) {
    throw FormatError("unsupported embedding index version " + std::to_string(version));
  }
  EmbeddingIndex index;
  index.encoder_id = r.String();
  index.dataset_id = r.String();
  const std::uint32_t dims = r.U32();
  const std::uint64_t rows = r.U64();
  if (dims == 0 || rows == 0 || r.remaining() != rows * dims * 4ULL) {
    throw FormatError("embedding index payload size does not match its header");
  }
  index.vectors.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
  for (Eigen::Index i = 0; i < index.vectors.rows(); ++i) {
    for (Eigen::Index k = 0; k < index.vectors.cols(); ++k) index.vectors(i, k) = r.F32();
  }
  index.Validate();
  return index;
}

void SaveEmbeddingIndex(const std::filesystem::path& path, const EmbeddingIndex& index) {
  WriteFileBytes(path, SerializeEmbeddingIndex(index));
}

EmbeddingIndex LoadEmbeddingIndex(const std::filesystem::path& path) {
  return DeserializeEmbeddingIndex(ReadFileBytes(path));
}

double Cosine(const EmbeddingIndex& a, std::size_t row_a, const EmbeddingIndex& b,
              std::size_t row_b) {
  // Elementwise products summed in index order, so the result is symmetric.
  const auto x = a.vectors.row(static_cast<Eigen::Index>(row_a));
  const auto y = b.vectors.row(static_cast<Eigen::Index>(row_b));
  double s = 0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

std::vector<OverlapMatch> BestMatches(const EmbeddingIndex& test, const EmbeddingIndex& train,
                                      int workers) {
  CheckCompatible(test, train);
  std::vector<OverlapMatch> out(test.rows());
  ParallelFor(test.rows(), workers, [&](std::size_t i) {
    OverlapMatch m{i, 0, Cosine(test, i, train, 0)};
    for (std::size_t j = 1; j < train.rows(); ++j) {
      const double c = Cosine(test, i, train, j);
      if (c > m.similarity) m = {i, j, c};
    }
    out[i] = m;
  });
  return out;
}

std::vector<OverlapMatch> DetectOverlaps(const EmbeddingIndex& test, const EmbeddingIndex& train,
                                         double threshold, ScanStrategy strategy, int workers) {
  CheckCompatible(test, train);
  if (!std::isfinite(threshold)) throw InvalidArgumentError("threshold must be finite");
  std::vector<std::optional<OverlapMatch>> found(test.rows());
  if (strategy == ScanStrategy::kExhaustive) {
    const auto best = BestMatches(test, train, workers);
    for (const auto& m : best) {
      if (m.similarity >= threshold) found[m.test_index] = m;
    }
  } else {
    Vec pivot = train.vectors.colwise().sum().transpose();
    if (pivot.norm() == 0) {
      pivot = Vec::Zero(train.dims());
      pivot[0] = 1;
    }
    pivot.normalize();
    const auto tp = Project(test, pivot);
    const auto rp = Project(train, pivot);
    ParallelFor(test.rows(), workers, [&](std::size_t i) {
      std::optional<OverlapMatch> best;
      for (std::size_t j = 0; j < train.rows(); ++j) {
        const double bound = tp[i].along * rp[j].along + tp[i].residual * rp[j].residual;
        if (bound + kBoundSlack < threshold) continue;
        const double c = Cosine(test, i, train, j);
        if (!best || c > best->similarity) best = OverlapMatch{i, j, c};
      }
      if (best && best->similarity >= threshold) found[i] = best;
    });
  }
  std::vector<OverlapMatch> out;
  for (const auto& f : found) {
    if (f) out.push_back(*f);
  }
  return out;
}

std::vector<OverlapReport> OverlapSweepReport(const ClassifierModel& model,
                                              const Dataset& test_dataset,
                                              const EmbeddingIndex& test_index,
                                              const EmbeddingIndex& train_index,
                                              const std::vector<double>& thresholds,
                                              int workers) {
  if (thresholds.empty()) throw InvalidArgumentError("threshold list is empty");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw InvalidArgumentError("thresholds must be sorted ascending");
  }
  if (test_index.rows() != test_dataset.size()) {
    throw ShapeMismatchError("test index rows do not match the test dataset");
  }
  if (test_index.dataset_id != test_dataset.Identity()) {
    throw InvalidArgumentError("test index was built from " + test_index.dataset_id + ", not " +
                               test_dataset.Identity());
  }
  const auto best = BestMatches(test_index, train_index, workers);
  const auto predictions = PredictAll(model, test_dataset, workers);
  const auto labels = Labels(test_dataset);
  const double full = AccuracyFromPredictions(predictions, labels);

  std::vector<OverlapReport> reports;
  for (double t : thresholds) {
    OverlapReport r;
    r.threshold = t;
    r.accuracy_full = full;
    std::size_t correct = 0;
    for (const auto& m : best) {
      if (m.similarity >= t) {
        r.overlapped.push_back(m);
      } else {
        ++r.cleaned_count;
        correct += predictions[m.test_index] == labels[m.test_index] ? 1 : 0;
      }
    }
    r.overlap_fraction =
        static_cast<double>(r.overlapped.size()) / static_cast<double>(test_dataset.size());
    if (r.cleaned_count > 0) {
      r.accuracy_cleaned = static_cast<double>(correct) / static_cast<double>(r.cleaned_count);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

nlohmann::json OverlapReportsToJson(const std::vector<OverlapReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& m : r.overlapped) {
      ids.push_back({{"test", m.test_index}, {"train", m.train_index}, {"similarity", m.similarity}});
    }
    out.push_back({{"threshold", r.threshold},
                   {"overlap_fraction", r.overlap_fraction},
                   {"overlap_pct", 100.0 * r.overlap_fraction},
                   {"accuracy_full", r.accuracy_full},
                   {"accuracy_cleaned", r.accuracy_cleaned ? nlohmann::json(*r.accuracy_cleaned)
                                                           : nlohmann::json()},
                   {"cleaned_count", r.cleaned_count},
                   {"overlapped", ids}});
  }
  return out;
}

std::string OverlapReportsToCsv(const std::vector<OverlapReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(10) << "threshold,overlap_pct,acc_full,acc_clean\n";
  for (const auto& r : reports) {
    os << r.threshold << ',' << 100.0 * r.overlap_fraction << ',' << r.accuracy_full << ',';
    if (r.accuracy_cleaned) {
      os << *r.accuracy_cleaned;
    } else {
      os << "NA";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace zsrobust
