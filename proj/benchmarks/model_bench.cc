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

#include "zsrobust/model/classifier.h"
#include "zsrobust/model/dual_encoder.h"
#include "zsrobust/model/network.h"
#include "zsrobust/shiftgen/toy.h"

namespace zsrobust {
namespace {

Dataset Toy(int size) {
  ToyDatasetSpec spec;
  spec.n_per_class = 4;
  spec.image_size = size;
  return GenerateToyDataset(spec);
}

std::shared_ptr<NetworkClassifier> Untrained(const Dataset& ds, int patch) {
  TrainConfig tc;
  tc.epochs = 0;
  return TrainClassifier(ds, ArchSpec{ArchKind::kMlp, patch, 32, 64}, tc);
}

void BM_MlpLogits(benchmark::State& state) {
  const Dataset ds = Toy(static_cast<int>(state.range(0)));
  const auto model = Untrained(ds, 8);
  for (auto _ : state) benchmark::DoNotOptimize(model->Logits(ds[0].image));
}
BENCHMARK(BM_MlpLogits)->Arg(32)->Arg(64);

void BM_MlpInputGradient(benchmark::State& state) {
  const Dataset ds = Toy(static_cast<int>(state.range(0)));
  const auto model = Untrained(ds, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(InputGradient(*model, ds[0].image, 0, LossDirection::kMaximize));
  }
}
BENCHMARK(BM_MlpInputGradient)->Arg(32)->Arg(64);

void BM_DualEncoderEpoch(benchmark::State& state) {
  const Dataset ds = Toy(32);
  std::vector<CaptionedImage> pairs;
  for (const auto& ex : ds.examples()) pairs.push_back({ex.image, "a photo of a " + ds.class_names()[ex.label]});
  TrainConfig tc;
  tc.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(TrainDualEncoder(pairs, ArchSpec{ArchKind::kMlp, 8, 32, 64}, tc));
  }
}
BENCHMARK(BM_DualEncoderEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zsrobust

BENCHMARK_MAIN();
