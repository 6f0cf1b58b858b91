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

#include "gmrf/metrics.hpp"
#include "gmrf/split.hpp"

#include <stdexcept>

namespace gmrf {

SplitSpec SplitSpec::from_labeled(NodeIndexSet labeled, Eigen::VectorXd y_labeled, SplitKind kind) {
  if (y_labeled.size() != static_cast<Eigen::Index>(labeled.size())) {
    throw std::invalid_argument("SplitSpec: y_labeled length differs from |L|");
  }
  SplitSpec s;
  s.unlabeled = labeled.complement();
  s.labeled = std::move(labeled);
  s.y_labeled = std::move(y_labeled);
  s.kind = kind;
  return s;
}

SplitSpec SplitSpec::from_outcome(NodeIndexSet labeled, const Eigen::VectorXd& y, SplitKind kind) {
  Eigen::VectorXd yl = labeled.gather(y);
  return from_labeled(std::move(labeled), std::move(yl), kind);
}

SplitSpec SplitSpec::with_labels(Eigen::VectorXd y) const {
  if (y.size() != static_cast<Eigen::Index>(labeled.size())) {
    throw std::invalid_argument("SplitSpec: label vector length differs from |L|");
  }
  SplitSpec s = *this;
  s.y_labeled = std::move(y);
  return s;
}

double r_squared(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("r_squared: length mismatch");
  if (truth.size() < 2) throw std::invalid_argument("r_squared: need at least 2 entries");
  const double ss_tot = (truth.array() - truth.mean()).square().sum();
  if (!(ss_tot > 0.0)) throw std::invalid_argument("r_squared: truth has zero variance");
  return 1.0 - (truth - pred).squaredNorm() / ss_tot;
}

double f1_score(const std::vector<int>& pred, const std::vector<int>& truth, int positive_class) {
  if (pred.size() != truth.size()) throw std::invalid_argument("f1_score: length mismatch");
  double tp = 0;
  double fp = 0;
  double fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == positive_class;
    const bool t = truth[i] == positive_class;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  if (tp == 0) return 0.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

}  // namespace gmrf
