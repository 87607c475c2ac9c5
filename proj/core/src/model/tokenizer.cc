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

#include "zsrobust/model/tokenizer.h"

#include <algorithm>
#include <cctype>
#include <set>

#include "zsrobust/common/error.h"

namespace zsrobust {

Tokenizer::Tokenizer() : Tokenizer(std::vector<std::string>{std::string(kUnkToken)}) {}

Tokenizer::Tokenizer(std::vector<std::string> vocab) : vocab_(std::move(vocab)) {
  if (vocab_.empty() || vocab_[0] != kUnkToken) {
    throw InvalidArgumentError("tokenizer vocabulary must start with <unk>");
  }
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], static_cast<int>(i)).second) {
      throw InvalidArgumentError("duplicate vocabulary entry '" + vocab_[i] + "'");
    }
  }
}

std::vector<std::string> Tokenizer::Split(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || std::ispunct(c)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

Tokenizer Tokenizer::Build(const std::vector<std::string>& corpus) {
  std::set<std::string> words;
  for (const auto& line : corpus) {
    for (auto& w : Split(line)) words.insert(std::move(w));
  }
  words.erase(std::string(kUnkToken));
  std::vector<std::string> vocab{std::string(kUnkToken)};
  vocab.insert(vocab.end(), words.begin(), words.end());
  return Tokenizer(std::move(vocab));
}

int Tokenizer::Lookup(std::string_view word) const {
  auto it = index_.find(word);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Tokenizer::Encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& w : Split(text)) ids.push_back(Lookup(w));
  if (ids.empty()) ids.push_back(kUnk);
  return ids;
}

const std::string& Tokenizer::token(int id) const {
  if (id < 0 || id >= size()) {
    throw InvalidArgumentError("token id " + std::to_string(id) + " outside vocabulary of " +
                               std::to_string(size()));
  }
  return vocab_[static_cast<std::size_t>(id)];
}

std::string Tokenizer::Decode(const std::vector<int>& ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(' ');
    out += token(ids[i]);
  }
  return out;
}

}  // namespace zsrobust
