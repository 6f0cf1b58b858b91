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

#ifndef GMRF_METRICS_HPP_
#define GMRF_METRICS_HPP_

#include <vector>

#include <Eigen/Dense>

namespace gmrf {

// 1 - sum (y - yhat)^2 / sum (y - mean y)^2. Throws std::invalid_argument on
// length mismatch, fewer than 2 entries, or zero variance of truth.
double r_squared(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

// F1 of `positive_class`; 0 when there are no true positives.
double f1_score(const std::vector<int>& pred, const std::vector<int>& truth, int positive_class = 1);

}  // namespace gmrf

#endif  // GMRF_METRICS_HPP_
