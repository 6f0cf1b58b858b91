// Copyright 2026 The gmrf-graphlearn Authors
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

#ifndef GMRF_PARALLEL_HPP_
#define GMRF_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace gmrf {

// Worker count: GMRF_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int max_threads();

// Runs body(i) for i in [0, count). Iterations are distributed over at most
// max_threads() workers; the first exception thrown by any iteration is
// rethrown after all workers join. Callers write results by index, so output
// never depends on scheduling. Calls made from inside a worker run serially,
// so nesting never exceeds the cap.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gmrf

#endif  // GMRF_PARALLEL_HPP_
