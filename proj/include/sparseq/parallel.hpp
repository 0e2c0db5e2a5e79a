/*
 * Copyright 2026 The sparseq authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SPARSEQ_PARALLEL_HPP
#define SPARSEQ_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace sparseq {

// Maximum worker threads: the SPARSEQ_THREADS environment variable when set
// to a positive integer, otherwise the hardware concurrency (at least 1).
int thread_cap();

// Runs fn(0) .. fn(n-1), possibly concurrently, returning after all calls
// finish. Callers that need determinism must make the iterations
// independent and do any reduction afterwards in index order. The first
// exception thrown by an iteration is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sparseq

#endif  // SPARSEQ_PARALLEL_HPP
