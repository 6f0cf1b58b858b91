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

#ifndef GMRF_ALGORITHMS_HPP_
#define GMRF_ALGORITHMS_HPP_

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmrf/graph.hpp"
#include "gmrf/split.hpp"

namespace gmrf {

// Smoothing level. omega >= 0 and alpha = omega / (1 + omega) in [0, 1) are
// two views of the same number.
class SmoothingParam {
 public:
  static SmoothingParam from_omega(double omega);
  static SmoothingParam from_alpha(double alpha);

  double omega() const { return omega_; }
  double alpha() const { return alpha_; }

 private:
  SmoothingParam(double omega, double alpha) : omega_(omega), alpha_(alpha) {}
  double omega_ = 0.0;
  double alpha_ = 0.0;
};

enum class Executor { kFixedPoint, kConjugateGradient };

struct PropagationBudget {
  int max_iterations = 1000;
  // Relative l2 change of the unknown block (fixed point), or relative
  // residual (CG).
  double rel_change_tolerance = 1e-9;
  Executor executor = Executor::kFixedPoint;
};

struct Diagnostics {
  int iterations = 0;
  double final_change = 0.0;
  bool converged = true;

  void merge(const Diagnostics& other);
};

struct PropagationResult {
  Eigen::VectorXd values;
  Diagnostics diagnostics;
};

struct MatrixPropagationResult {
  Eigen::MatrixXd values;
  Diagnostics diagnostics;
};

// Constrained label propagation: y_L stays pinned and
//   y_U <- alpha (S_UU y_U + S_UL y_L)
// from y_U = 0. Returns the values on U (in split.unlabeled order). If the
// budget runs out the last iterate is returned with converged = false.
PropagationResult label_propagation(const Graph& g, const SplitSpec& split,
                                    const SmoothingParam& s, const PropagationBudget& budget = {});

// f <- (1 - alpha) f0 + alpha S f over all nodes, column by column.
MatrixPropagationResult label_propagation_unconstrained(const Graph& g, const Eigen::MatrixXd& f0,
                                                        double alpha,
                                                        const PropagationBudget& budget = {});
PropagationResult label_propagation_unconstrained(const Graph& g, const Eigen::VectorXd& f0,
                                                  double alpha,
                                                  const PropagationBudget& budget = {});

// One-vs-rest constrained LP on one-hot labels, then argmax on U (ties to the
// lowest class). labels_L are in [0, num_classes).
std::vector<int> label_propagation_multiclass(const Graph& g, const NodeIndexSet& labeled,
                                              const std::vector<int>& labels_L, int num_classes,
                                              const SmoothingParam& s,
                                              const PropagationBudget& budget = {});

// X_bar = (I + omega N)^{-1} X, column by column.
MatrixPropagationResult smooth_features(const Graph& g, const Eigen::MatrixXd& X,
                                        const SmoothingParam& s,
                                        const PropagationBudget& budget = {});

// S~^K X.
Eigen::MatrixXd sgc_features(const Graph& g, const Eigen::MatrixXd& X, int K);

struct RegressionCoefficients {
  Eigen::VectorXd beta;
  std::optional<double> intercept;
};

// Minimum-norm least squares via complete orthogonal decomposition with a
// relative rank threshold of 1e-10.
RegressionCoefficients ols(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets);

// OLS on the labeled rows of `features`; returns predictions on all n nodes.
Eigen::VectorXd regress_all_nodes(const Eigen::MatrixXd& features, const SplitSpec& split,
                                  RegressionCoefficients* coef = nullptr);

// Plain linear regression on X.
Eigen::VectorXd lr_predict(const Eigen::MatrixXd& X, const SplitSpec& split);

// Regression on smoothed features.
Eigen::VectorXd lgc_predict(const Graph& g, const Eigen::MatrixXd& X, const SplitSpec& split,
                            const SmoothingParam& s, const PropagationBudget& budget = {},
                            Diagnostics* diag = nullptr);
// X_bar_U beta with beta supplied.
Eigen::VectorXd lgc_predict_fixed_beta(const Graph& g, const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& beta, const SplitSpec& split,
                                       const SmoothingParam& s,
                                       const PropagationBudget& budget = {});

Eigen::VectorXd sgc_predict(const Graph& g, const Eigen::MatrixXd& X, const SplitSpec& split,
                            int K);

// base_U + LP(y_L - base_L)_U. base_pred has length n.
Eigen::VectorXd residual_propagation(const Graph& g, const Eigen::VectorXd& base_pred,
                                     const SplitSpec& split, const SmoothingParam& s,
                                     const PropagationBudget& budget = {},
                                     Diagnostics* diag = nullptr);

// LGC followed by residual propagation. rp_smoothing defaults to s.
Eigen::VectorXd lgc_rp_predict(const Graph& g, const Eigen::MatrixXd& X, const SplitSpec& split,
                               const SmoothingParam& s, const PropagationBudget& budget = {},
                               std::optional<SmoothingParam> rp_smoothing = std::nullopt,
                               Diagnostics* diag = nullptr);

// Predictors by name, for experiment drivers.
enum class Algorithm { kLP, kLR, kLGC, kSGC, kLGCRP, kSGCRP };

std::string algorithm_name(Algorithm a);
// Accepts "LP", "LR", "LGC", "SGC", "LGC/RP", "SGC/RP" (case-insensitive).
// Throws ConfigError otherwise.
Algorithm parse_algorithm(const std::string& name);
bool algorithm_uses_omega(Algorithm a);
bool algorithm_uses_k(Algorithm a);

struct Hyperparameters {
  double omega = 1.0;
  int K = 2;
  // omega of the residual-propagation stage (LGC/RP, SGC/RP). NaN means
  // "use omega".
  double rp_omega = std::numeric_limits<double>::quiet_NaN();
};

// Runs one predictor; X may have zero columns for LP.
Eigen::VectorXd predict(Algorithm alg, const Graph& g, const Eigen::MatrixXd& X,
                        const SplitSpec& split, const Hyperparameters& hp,
                        const PropagationBudget& budget = {}, Diagnostics* diag = nullptr);

// LR, LGC and SGC need no labels on the graph they predict on.
bool algorithm_is_inductive(Algorithm a);

// Fits on the labeled nodes of the training graph and predicts every node of
// the test graph with the same coefficients. Throws ConfigError for
// algorithms that propagate labels.
Eigen::VectorXd predict_inductive(Algorithm alg, const Graph& g_train, const Eigen::MatrixXd& X_train,
                                  const SplitSpec& train, const Graph& g_test,
                                  const Eigen::MatrixXd& X_test, const Hyperparameters& hp,
                                  const PropagationBudget& budget = {});

// 1 iff score >= threshold.
std::vector<int> classify_by_threshold(const Eigen::VectorXd& scores, double threshold);

struct ThresholdChoice {
  double threshold = 0.0;
  double f1 = 0.0;
};

// Maximizes F1 of class 1 over {min score} and the midpoints of consecutive
// sorted unique scores; ties go to the smaller threshold. Labels are 0/1.
ThresholdChoice tune_threshold(const Eigen::VectorXd& scores, const std::vector<int>& labels);

}  // namespace gmrf

#endif  // GMRF_ALGORITHMS_HPP_
