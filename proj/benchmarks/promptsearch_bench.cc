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

#include <numeric>
#include <random>

#include "zsrobust/promptsearch/search.h"

namespace zsrobust {
namespace {

LinearPromptObjective Objective(int vocab, int dim, int examples) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> n(0, 1);
  auto random = [&](int r, int c) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(g);
    return m;
  };
  const PromptTemplate t = PromptTemplate::Parse("[T][T][T][T][C]");
  std::vector<Mat> w;
  std::vector<double> off;
  for (int b = 0; b < examples; ++b) {
    w.push_back(random(t.num_triggers(), dim));
    off.push_back(n(g));
  }
  return LinearPromptObjective(t, random(vocab, dim), w, off);
}

void BM_ScoreCandidates(benchmark::State& state) {
  const auto obj = Objective(static_cast<int>(state.range(0)), 32, 64);
  std::vector<std::size_t> batch(64);
  std::iota(batch.begin(), batch.end(), 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ScoreTokenCandidates(obj, {0, 1, 2, 3}, 1, batch, 20));
  }
}
BENCHMARK(BM_ScoreCandidates)->Arg(100)->Arg(1000);

void BM_BeamSearch(benchmark::State& state) {
  const auto obj = Objective(500, 32, 256);
  PromptSearchConfig cfg;
  cfg.batch_size = 64;
  for (auto _ : state) benchmark::DoNotOptimize(BeamSearchPrompts(obj, {0, 1, 2, 3}, cfg));
}
BENCHMARK(BM_BeamSearch)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zsrobust

BENCHMARK_MAIN();
