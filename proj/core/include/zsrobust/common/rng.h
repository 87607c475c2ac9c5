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

#ifndef ZSROBUST_COMMON_RNG_H_
#define ZSROBUST_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace zsrobust {

using Rng = std::mt19937_64;

// Derives the seed of a named substream. Every stochastic choice in the
// library draws from a stream identified by (master seed, name, index), so
// results never depend on scheduling or on the order stages run in.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view stream,
                         std::uint64_t index = 0);

inline Rng MakeRng(std::uint64_t master, std::string_view stream,
                   std::uint64_t index = 0) {
  return Rng(DeriveSeed(master, stream, index));
}

}  // namespace zsrobust

#endif  // ZSROBUST_COMMON_RNG_H_
