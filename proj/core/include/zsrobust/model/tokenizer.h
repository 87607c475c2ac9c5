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

#ifndef ZSROBUST_MODEL_TOKENIZER_H_
#define ZSROBUST_MODEL_TOKENIZER_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace zsrobust {

// Lowercases, splits on whitespace and ASCII punctuation (punctuation is
// dropped) and maps words to ids. Id 0 is <unk>.
class Tokenizer {
 public:
  static constexpr int kUnk = 0;
  static constexpr std::string_view kUnkToken = "<unk>";

  Tokenizer();
  // `vocab[0]` must be "<unk>"; remaining entries must be unique words.
  explicit Tokenizer(std::vector<std::string> vocab);

  // Vocabulary of <unk> followed by the sorted distinct words of `corpus`.
  static Tokenizer Build(const std::vector<std::string>& corpus);
  static std::vector<std::string> Split(std::string_view text);

  // Never empty: text without any word encodes as a single <unk>.
  std::vector<int> Encode(std::string_view text) const;
  std::string Decode(const std::vector<int>& ids) const;
  int Lookup(std::string_view word) const;

  int size() const { return static_cast<int>(vocab_.size()); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::string& token(int id) const;

 private:
  std::vector<std::string> vocab_;
  std::map<std::string, int, std::less<>> index_;
};

}  // namespace zsrobust

#endif  // ZSROBUST_MODEL_TOKENIZER_H_
