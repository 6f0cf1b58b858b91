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

#ifndef GMRF_EVAL_HPP_
#define GMRF_EVAL_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmrf/algorithms.hpp"
#include "gmrf/gmrf.hpp"
#include "gmrf/graph.hpp"
#include "gmrf/metrics.hpp"
#include "gmrf/split.hpp"

namespace gmrf {

// round(fraction * n) labeled nodes drawn uniformly without replacement.
NodeIndexSet random_split(int n, double fraction, std::uint64_t seed);

// Fold id in [0, folds) for each of `count` items; sizes differ by at most 1.
std::vector<int> kfold_assignment(int count, int folds, std::uint64_t seed);

// `count` log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

enum class Metric { kR2, kF1 };

struct CvPlan {
  int folds = 5;
  std::vector<double> omega_grid = log_grid(0.1, 100.0, 13);
  std::vector<int> k_grid = {0, 1, 2, 3, 4};
  // Separate grid for the residual-propagation omega. Empty means LGC/RP
  // uses one omega for both stages and SGC/RP searches omega_grid.
  std::vector<double> rp_omega_grid;
  std::uint64_t seed = 0;
  Metric metric = Metric::kR2;
  PropagationBudget budget;
};

struct GridScore {
  Hyperparameters hp;
  double mean_score = 0.0;
  std::vector<double> fold_scores;  // NaN for skipped folds
};

struct CvResult {
  Hyperparameters best;
  double best_score = 0.0;
  std::vector<GridScore> grid;
  int skipped_folds = 0;
  // F1 only: threshold tuned on pooled out-of-fold scores at `best`.
  double threshold = 0.0;
};

// K-fold search over the labeled set. Each fold's validation nodes are
// passed to the predictor as unlabeled, so their labels are never seen.
// Ties go to the earlier grid point (smaller omega, then smaller K).
CvResult cross_validate(const Graph& g, const Eigen::MatrixXd& X, const SplitSpec& split,
                        Algorithm alg, const CvPlan& plan);

// Hyperparameter combinations searched for `alg`, in tie-break order.
std::vector<Hyperparameters> hyperparameter_grid(Algorithm alg, const CvPlan& plan);

// 1 - tr(Sigma_A) / (tr(Sigma_0) - 1^T Sigma_0 1 / |U|).
double r2_from_covariances(const Eigen::MatrixXd& sigma_alg, const Eigen::MatrixXd& sigma_0);

// Analytic R^2 estimates from model parameters. The dense covariance
// Sigma = Gamma^{-1} and the split-independent feature conditioning are
// computed once and reused across splits.
class R2Estimator {
 public:
  // The outcome is the last attribute. Throws std::invalid_argument when
  // n(p+1) exceeds max_dense_dim.
  R2Estimator(const GmrfParams& params, const Graph& g, Eigen::Index max_dense_dim = 4000);

  // Algorithm must be LP, LGC or LGC/RP.
  double estimate(Algorithm alg, const SplitSpec& split) const;

  // Sigma^(A) restricted to U, and Sigma^(0) = Sigma_{P_U P_U}.
  Eigen::MatrixXd conditional_covariance(Algorithm alg, const SplitSpec& split) const;
  Eigen::MatrixXd marginal_covariance(const SplitSpec& split) const;

 private:
  Eigen::Index n_;
  Eigen::MatrixXd sigma_yy_;  // Sigma_{PP}, the outcome block
  Eigen::MatrixXd sigma_y_given_x_;  // Sigma_PP - Sigma_PQ Sigma_QQ^{-1} Sigma_QP
};

double estimate_r2(const GmrfParams& params, const Graph& g, const SplitSpec& split,
                   Algorithm alg);

// Prediction of y_U from y_L after marginalizing the features out of the
// precision: Gamma_bar = Gamma_PP - Gamma_PQ Gamma_QQ^{-1} Gamma_QP, result
// -Gamma_bar_UU^{-1} Gamma_bar_UL y_L. Dense.
Eigen::VectorXd marginalized_lp_oracle(const GmrfParams& params, const Graph& g,
                                       const SplitSpec& split);

struct FilterSpec {
  enum class Kind { kLGC, kSGC } kind = Kind::kLGC;
  double omega = 1.0;  // LGC
  int K = 1;           // SGC
  double degree = 1.0; // SGC; exact only on d-regular graphs
};

// LGC: 1 / (1 + omega lambda). SGC: ((d + 1 - d lambda) / (d + 1))^K.
// lambda must lie in [0, 2].
double filter_response(const FilterSpec& spec, double lambda);
std::vector<double> filter_response(const FilterSpec& spec, const std::vector<double>& lambdas);

// CSV with header `lambda,response`.
std::string filter_response_csv(const FilterSpec& spec, const std::vector<double>& lambdas);

}  // namespace gmrf

#endif  // GMRF_EVAL_HPP_
