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

// Shared fixtures for the unit tests.

#ifndef ZSROBUST_TESTS_FIXTURES_H_
#define ZSROBUST_TESTS_FIXTURES_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "zsrobust/common/dataset.h"
#include "zsrobust/model/network.h"

namespace zsrobust::testing {

// Binary linear model on a 1x1 image (3 features). The logit margin is
// w.x with w = (1, -1, 0), so x = (0.6, 0.5, *) has margin 0.1 and the
// smallest flipping l-inf perturbation is 0.1 / |w|_1 = 0.05.
inline std::shared_ptr<NetworkClassifier> LinearOracleModel() {
  Mat w(2, 3);
  w << 0.5, -0.5, 0.0, -0.5, 0.5, 0.0;
  return NetworkClassifier::FromLinearWeights({1, 1, 3}, w, Vec::Zero(2), {"pos", "neg"});
}

inline LabeledExample LinearOracleExample() {
  return {Image(1, 1, std::vector<double>{0.6, 0.5, 0.3}), 0, std::nullopt};
}

// Same model family with random weights over `h` x `w` images.
inline std::shared_ptr<NetworkClassifier> RandomLinearModel(int classes, int h, int w,
                                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  const int d = 3 * h * w;
  Mat weights(classes, d);
  for (int i = 0; i < weights.size(); ++i) weights.data()[i] = n(rng);
  Vec bias(classes);
  for (int i = 0; i < classes; ++i) bias[i] = 0.1 * n(rng);
  return NetworkClassifier::FromLinearWeights({h, w, 3}, weights, bias);
}

inline Image RandomImage(int h, int w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Image img(h, w);
  for (double& v : img.mutable_data()) v = u(rng);
  return img;
}

inline Dataset RandomDataset(int n, int classes, int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> names;
  for (int c = 0; c < classes; ++c) names.push_back("class" + std::to_string(c));
  Dataset ds("random", names);
  for (int i = 0; i < n; ++i) {
    Image img = RandomImage(h, w, rng);
    img.QuantizeTo8Bit();
    ds.Add({img, i % classes, std::nullopt});
  }
  return ds;
}

// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("zsrobust-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace zsrobust::testing

#endif  // ZSROBUST_TESTS_FIXTURES_H_
