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

#ifndef GMRF_SPLIT_HPP_
#define GMRF_SPLIT_HPP_

#include <Eigen/Dense>

#include "gmrf/graph.hpp"

namespace gmrf {

enum class SplitKind { kTransductive, kInductive };

// Labeled set L with its observed outcomes, and the unlabeled set U = V \ L.
struct SplitSpec {
  NodeIndexSet labeled;
  NodeIndexSet unlabeled;
  Eigen::VectorXd y_labeled;  // aligned with `labeled`
  SplitKind kind = SplitKind::kTransductive;

  // U is the complement of L. Throws std::invalid_argument on length mismatch.
  static SplitSpec from_labeled(NodeIndexSet labeled, Eigen::VectorXd y_labeled,
                                SplitKind kind = SplitKind::kTransductive);
  // Convenience: y_L read from a full outcome vector.
  static SplitSpec from_outcome(NodeIndexSet labeled, const Eigen::VectorXd& y,
                                SplitKind kind = SplitKind::kTransductive);

  // Same sets, different observed values (e.g. residuals).
  SplitSpec with_labels(Eigen::VectorXd y) const;

  int num_nodes() const { return labeled.universe(); }
};

}  // namespace gmrf

#endif  // GMRF_SPLIT_HPP_
