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

#ifndef ZSROBUST_COMMON_PARALLEL_H_
#define ZSROBUST_COMMON_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace zsrobust {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Indices are split
// into contiguous blocks; callers write results into per-index slots so the
// output never depends on the worker count. The exception thrown for the
// lowest failing index is rethrown after all workers join.
void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t)>& fn);

}  // namespace zsrobust

#endif  // ZSROBUST_COMMON_PARALLEL_H_
