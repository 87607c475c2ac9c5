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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "fixtures.h"

namespace {

using zsrobust::testing::TempDir;

class CliTest : public ::testing::Test {
 protected:
  // Runs the CLI inside the temp dir and returns its exit code.
  int Cli(const std::string& args) {
    const std::string bin = ZSROBUST_CLI;
    const std::string cmd = "cd '" + dir_.path().string() + "' && '" + bin + "' " + args +
                            " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string Slurp(const std::string& name) {
    std::ifstream in(dir_ / name);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }
  TempDir dir_;
};

TEST_F(CliTest, DatasetModelAttackPipeline) {
  ASSERT_EQ(Cli("--seed 1 --out toy gen-toy --n-per-class 3 --size 16 --format rozt"), 0);
  ASSERT_EQ(Cli("--seed 1 --out typo typo-gen --input toy --k-coords 2"), 0) << Slurp("err.txt");
  ASSERT_EQ(Cli("--seed 1 --out noisy corrupt --input toy --kind gaussian_noise --severity 3"), 0)
      << Slurp("err.txt");
  ASSERT_EQ(Cli("--seed 1 --out m.rozm train --data toy --arch linear"), 0) << Slurp("err.txt");
  ASSERT_EQ(Cli("--seed 1 --out a.jsonl attack --model m.rozm --data toy --method bim --max-images 4"), 0)
      << Slurp("err.txt");
  EXPECT_NE(Slurp("out.txt").find("\"success_rate\""), std::string::npos);
  ASSERT_EQ(Cli("--out e.json eval --model m.rozm --data typo"), 0) << Slurp("err.txt");
}

TEST_F(CliTest, SameSeedSameDataset) {
  ASSERT_EQ(Cli("--seed 4 --out a gen-toy --n-per-class 2 --size 16"), 0);
  const std::string first = Slurp("out.txt");
  ASSERT_EQ(Cli("--seed 4 --out b gen-toy --n-per-class 2 --size 16"), 0);
  EXPECT_EQ(Slurp("out.txt"), first);
}

TEST_F(CliTest, ConfigErrorsExitWithTwo) {
  EXPECT_EQ(Cli("gen-toy --format xyz --out x"), 2);
  EXPECT_EQ(Cli("no-such-command"), 2);
  EXPECT_EQ(Cli("gen-toy --n-per-class"), 2);
  std::ofstream(dir_ / "bad.json") << R"({"seed": 1, "colour": "blue"})";
  EXPECT_EQ(Cli("--config bad.json --out run report"), 2);
  EXPECT_NE(Slurp("err.txt").find("colour"), std::string::npos);
}

TEST_F(CliTest, RuntimeFailuresExitWithThree) {
  EXPECT_EQ(Cli("--out a.jsonl attack --model missing.rozm --data nowhere"), 3);
  EXPECT_EQ(Cli("bridge-check --endpoint /bin/false --timeout-ms 2000"), 3);
  EXPECT_NE(Slurp("err.txt").find("transport"), std::string::npos);
}

TEST_F(CliTest, BridgeCheckAgainstTestPeer) {
  ASSERT_EQ(Cli(std::string("bridge-check --endpoint '") + ZSROBUST_TEST_PEER + " echo'"), 0) << Slurp("err.txt");
  EXPECT_NE(Slurp("out.txt").find("probe_logits"), std::string::npos);
}

TEST_F(CliTest, DefaultConfigRoundTrips) {
  ASSERT_EQ(Cli("report --print-default-config"), 0);
  std::filesystem::rename(dir_ / "out.txt", dir_ / "default.json");
  // The printed config is accepted back; a bogus format is not.
  EXPECT_EQ(Cli("--config default.json --out run report --format xlsx"), 2);
}

}  // namespace
