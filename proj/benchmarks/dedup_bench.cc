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

#include <benchmark/benchmark.h>

#include <random>

#include "zsrobust/dedup/dedup.h"

namespace zsrobust {
namespace {

// Clustered unit rows so the prefilter has something to prune.
EmbeddingIndex Index(int rows, int dims, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n(0, 1);
  Mat m(rows, dims);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(g);
  m.col(0).array() += 3.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m.row(i).normalize();
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<float>(m(i, j));
  }
  return {"bench", "bench", m};
}

void Scan(benchmark::State& state, ScanStrategy strategy) {
  const int n = static_cast<int>(state.range(0));
  const auto train = Index(n, 32, 1), test = Index(n, 32, 2);
  for (auto _ : state) benchmark::DoNotOptimize(DetectOverlaps(test, train, 0.95, strategy));
  state.SetComplexityN(n);
}

void BM_ExhaustiveScan(benchmark::State& s) { Scan(s, ScanStrategy::kExhaustive); }
void BM_PrefilterScan(benchmark::State& s) { Scan(s, ScanStrategy::kProjectionPrefilter); }

BENCHMARK(BM_ExhaustiveScan)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PrefilterScan)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zsrobust

BENCHMARK_MAIN();
