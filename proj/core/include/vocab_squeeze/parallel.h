// Copyright 2020 The Authors.
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

#ifndef VOCAB_SQUEEZE_PARALLEL_H_
#define VOCAB_SQUEEZE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace vocab_squeeze {

// Thread budget: VOCAB_SQUEEZE_THREADS if set to a positive integer,
// otherwise std::thread::hardware_concurrency() (at least 1).
int DefaultThreadCount();

// Calls fn(i) for every i in [begin, end) using up to `num_threads` threads
// with static contiguous chunking. fn must not throw across iterations that
// share state; the first exception thrown by any worker is rethrown after
// all workers have joined.
void ParallelFor(std::size_t begin, std::size_t end, int num_threads,
                 const std::function<void(std::size_t)>& fn);

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_PARALLEL_H_
