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

#include "gmrf/linbp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gmrf {

using Eigen::Index;
using Eigen::MatrixXd;

LinBpConfig LinBpConfig::create(const Graph& g, int num_classes, double epsilon,
                                PropagationBudget budget) {
  if (num_classes < 2) throw std::invalid_argument("LinBpConfig: need at least 2 classes");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("LinBpConfig: epsilon must be positive");
  }
  if (budget.max_iterations < 1 || !(budget.rel_change_tolerance > 0.0)) {
    throw std::invalid_argument("LinBpConfig: invalid budget");
  }
  const double rho = adjacency_spectral_radius(g);
  if (rho > 0.0 && !(epsilon < num_classes / rho)) {
    throw std::invalid_argument("LinBpConfig: epsilon " + std::to_string(epsilon) +
                                " violates eps < c / rho(W) = " +
                                std::to_string(num_classes / rho));
  }
  return LinBpConfig(num_classes, epsilon, rho, budget);
}

double ResidualBeliefs::max_row_sum() const {
  if (values.size() == 0) return 0.0;
  return values.rowwise().sum().cwiseAbs().maxCoeff();
}

ResidualBeliefs residual_priors_from_labels(const Graph& g, const NodeIndexSet& labeled,
                                            const std::vector<int>& labels_L,
                                            const LinBpConfig& cfg) {
  if (labeled.universe() != g.num_nodes()) {
    throw std::invalid_argument("residual priors: labeled set built for another graph");
  }
  if (labels_L.size() != labeled.size()) {
    throw std::invalid_argument("residual priors: label count differs from |L|");
  }
  const int c = cfg.num_classes();
  std::vector<int> label_of(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (labels_L[i] < 0 || labels_L[i] >= c) {
      throw std::invalid_argument("residual priors: label out of range");
    }
    label_of[labeled[i]] = labels_L[i];
  }
  const NodeIndexSet unlabeled = labeled.complement();
  ResidualBeliefs out;
  out.values = MatrixXd::Zero(static_cast<Index>(unlabeled.size()), c);
  const double scale = cfg.epsilon() / c;
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    const int u = unlabeled[i];
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    double d_l = 0.0;
    for (std::size_t t = 0; t < nb.size(); ++t) {
      const int k = label_of[nb[t]];
      if (k < 0) continue;
      out.values(i, k) += w[t];
      d_l += w[t];
    }
    out.values.row(i) = scale * (out.values.row(i).array() - d_l / c).matrix();
  }
  return out;
}

namespace {

LinBpResult iterate(const Graph& g, const ResidualBeliefs& priors, const LinBpConfig& cfg,
                    double w_coef, double d_coef) {
  if (priors.values.rows() != g.num_nodes() || priors.values.cols() != cfg.num_classes()) {
    throw std::invalid_argument("linbp: priors must be |U| x c for the propagation graph");
  }
  const auto& budget = cfg.budget();
  const MatrixXd& phi = priors.values;
  MatrixXd p = phi;
  LinBpResult res;
  res.diagnostics.converged = false;
  for (int it = 1; it <= budget.max_iterations; ++it) {
    MatrixXd next = phi + w_coef * apply_adjacency(g, p);
    if (d_coef != 0.0) next -= d_coef * (g.degree().asDiagonal() * p);
    const double diff = (next - p).norm();
    const double scale = next.norm();
    const double change = diff == 0.0 ? 0.0 : (scale > 0.0 ? diff / scale : INFINITY);
    p = std::move(next);
    res.diagnostics.iterations = it;
    res.diagnostics.final_change = change;
    if (change < budget.rel_change_tolerance) {
      res.diagnostics.converged = true;
      break;
    }
  }
  res.beliefs.values = std::move(p);
  return res;
}

}  // namespace

LinBpResult linbp_run(const Graph& g_uu, const ResidualBeliefs& priors, const LinBpConfig& cfg) {
  return iterate(g_uu, priors, cfg, cfg.epsilon() / cfg.num_classes(), 0.0);
}

LinBpResult linbp_run_second_order(const Graph& g_uu, const ResidualBeliefs& priors,
                                   const LinBpConfig& cfg) {
  const double e = cfg.epsilon();
  const double c = cfg.num_classes();
  const double kappa = 1.0 / (1.0 - e * e / (c * c));
  return iterate(g_uu, priors, cfg, e * kappa / c, e * e * kappa / (c * c));
}

std::vector<int> linbp_classify(const ResidualBeliefs& beliefs) {
  std::vector<int> out(static_cast<std::size_t>(beliefs.values.rows()));
  for (Index u = 0; u < beliefs.values.rows(); ++u) {
    int best = 0;
    for (Index k = 1; k < beliefs.values.cols(); ++k) {
      if (beliefs.values(u, k) > beliefs.values(u, best)) best = static_cast<int>(k);
    }
    out[u] = best;
  }
  return out;
}

std::vector<int> linbp_predict(const Graph& g, const NodeIndexSet& labeled,
                               const std::vector<int>& labels_L, const LinBpConfig& cfg) {
  const ResidualBeliefs priors = residual_priors_from_labels(g, labeled, labels_L, cfg);
  const Graph g_uu = induced_subgraph(g, labeled.complement());
  return linbp_classify(linbp_run(g_uu, priors, cfg).beliefs);
}

}  // namespace gmrf
