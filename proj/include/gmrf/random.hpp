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

#ifndef GMRF_RANDOM_HPP_
#define GMRF_RANDOM_HPP_

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace gmrf {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent child seeds from a parent
// seed and a counter, so that per-probe / per-restart / per-repeat streams do
// not depend on scheduling order.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0) {
  return mix_seed(mix_seed(mix_seed(seed) ^ stream) ^ index);
}

inline Eigen::VectorXd rademacher_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = (rng() >> 63) ? 1.0 : -1.0;
  return z;
}

inline Eigen::VectorXd standard_normal_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

// Stream identifiers for derive_seed. Keep stable: changing them changes
// every seeded output.
namespace streams {
inline constexpr std::uint64_t kProbe = 1;
inline constexpr std::uint64_t kSample = 2;
inline constexpr std::uint64_t kRestart = 3;
inline constexpr std::uint64_t kSplit = 4;
inline constexpr std::uint64_t kFold = 5;
inline constexpr std::uint64_t kGraph = 6;
inline constexpr std::uint64_t kParams = 7;
inline constexpr std::uint64_t kRepeat = 8;
}  // namespace streams

}  // namespace gmrf

#endif  // GMRF_RANDOM_HPP_
