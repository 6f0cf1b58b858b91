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

#ifndef GMRF_LINBP_HPP_
#define GMRF_LINBP_HPP_

#include <vector>

#include <Eigen/Dense>

#include "gmrf/algorithms.hpp"
#include "gmrf/graph.hpp"

namespace gmrf {

// Homophily coupling Phi = (1 - eps/c) J + eps I on c classes.
class LinBpConfig {
 public:
  // Checks eps < c / rho(W) with rho estimated by power iteration on g
  // (the graph the propagation will run on, or a supergraph of it).
  static LinBpConfig create(const Graph& g, int num_classes, double epsilon,
                            PropagationBudget budget = {});

  int num_classes() const { return c_; }
  double epsilon() const { return eps_; }
  double spectral_radius() const { return rho_; }
  const PropagationBudget& budget() const { return budget_; }

 private:
  LinBpConfig(int c, double eps, double rho, PropagationBudget b)
      : c_(c), eps_(eps), rho_(rho), budget_(b) {}
  int c_;
  double eps_;
  double rho_;
  PropagationBudget budget_;
};

// Rows are residual vectors p_u - 1/c; each row sums to zero.
struct ResidualBeliefs {
  Eigen::MatrixXd values;

  // Largest absolute row sum.
  double max_row_sum() const;
};

// phi_u(k) = (eps/c) (d_u^{L,k} - d_u^L / c) for u in `unlabeled`, where the
// neighbour counts are edge-weight sums (plain counts on unweighted graphs).
ResidualBeliefs residual_priors_from_labels(const Graph& g, const NodeIndexSet& labeled,
                                            const std::vector<int>& labels_L,
                                            const LinBpConfig& cfg);

struct LinBpResult {
  ResidualBeliefs beliefs;
  Diagnostics diagnostics;
};

// p <- phi + (eps/c) W p on g_uu, from p = phi.
LinBpResult linbp_run(const Graph& g_uu, const ResidualBeliefs& priors, const LinBpConfig& cfg);

// Update with the converged messages kept to second order in eps:
//   p <- phi + (eps kappa / c) W p - (eps^2 kappa / c^2) D p,
// kappa = 1 / (1 - eps^2 / c^2).
LinBpResult linbp_run_second_order(const Graph& g_uu, const ResidualBeliefs& priors,
                                   const LinBpConfig& cfg);

// argmax per row, ties to the lowest class.
std::vector<int> linbp_classify(const ResidualBeliefs& beliefs);

// Priors from L, propagation on the subgraph induced by U, argmax. Returns
// classes for the complement of `labeled`, in increasing node order.
std::vector<int> linbp_predict(const Graph& g, const NodeIndexSet& labeled,
                               const std::vector<int>& labels_L, const LinBpConfig& cfg);

}  // namespace gmrf

#endif  // GMRF_LINBP_HPP_
