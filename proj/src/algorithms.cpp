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

#include "gmrf/algorithms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "gmrf/error.hpp"
#include "gmrf/linalg.hpp"
#include "gmrf/metrics.hpp"
#include "gmrf/parallel.hpp"

namespace gmrf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

SmoothingParam SmoothingParam::from_omega(double omega) {
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("SmoothingParam: omega must be finite and >= 0");
  }
  return SmoothingParam(omega, omega / (1.0 + omega));
}

SmoothingParam SmoothingParam::from_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("SmoothingParam: alpha must lie in [0, 1)");
  }
  return SmoothingParam(alpha / (1.0 - alpha), alpha);
}

void Diagnostics::merge(const Diagnostics& other) {
  iterations = std::max(iterations, other.iterations);
  final_change = std::max(final_change, other.final_change);
  converged = converged && other.converged;
}

namespace {

void check_budget(const PropagationBudget& b) {
  if (b.max_iterations < 1 || !(b.rel_change_tolerance > 0.0)) {
    throw std::invalid_argument("PropagationBudget: max_iterations and tolerance must be positive");
  }
}

void check_split(const Graph& g, const SplitSpec& split) {
  if (split.labeled.universe() != g.num_nodes() || split.unlabeled.universe() != g.num_nodes()) {
    throw std::invalid_argument("split was built for a graph of different size");
  }
  if (split.labeled.size() + split.unlabeled.size() != static_cast<std::size_t>(g.num_nodes())) {
    throw std::invalid_argument("split: L and U must partition the nodes");
  }
  if (split.y_labeled.size() != static_cast<Index>(split.labeled.size())) {
    throw std::invalid_argument("split: y_L length differs from |L|");
  }
}

double rel_change(const VectorXd& next, const VectorXd& prev) {
  const double d = (next - prev).norm();
  if (d == 0.0) return 0.0;
  const double scale = next.norm();
  return scale > 0.0 ? d / scale : std::numeric_limits<double>::infinity();
}

}  // namespace

PropagationResult label_propagation(const Graph& g, const SplitSpec& split,
                                    const SmoothingParam& s, const PropagationBudget& budget) {
  check_budget(budget);
  check_split(g, split);
  const Index n = g.num_nodes();
  const Index nu = static_cast<Index>(split.unlabeled.size());
  PropagationResult res;
  res.values = VectorXd::Zero(nu);
  if (nu == 0) return res;
  if (split.labeled.empty()) throw std::invalid_argument("label_propagation: L is empty");
  const double alpha = s.alpha();

  if (budget.executor == Executor::kConjugateGradient) {
    const double omega = s.omega();
    VectorXd yl = VectorXd::Zero(n);
    split.labeled.scatter(split.y_labeled, yl);
    const VectorXd rhs = omega * split.unlabeled.gather(apply_normalized_adjacency(g, yl));
    LinearOperator op{nu, [&](const VectorXd& v) -> VectorXd {
                        VectorXd full = VectorXd::Zero(n);
                        split.unlabeled.scatter(v, full);
                        return (1.0 + omega) * v -
                               omega * split.unlabeled.gather(apply_normalized_adjacency(g, full));
                      }};
    CgConfig cfg;
    cfg.rel_tolerance = budget.rel_change_tolerance;
    cfg.max_iterations = budget.max_iterations;
    CgResult cg = conjugate_gradient_run(op, rhs, cfg);
    res.values = std::move(cg.x);
    res.diagnostics = {cg.iterations, cg.rel_residual, cg.converged};
    return res;
  }

  VectorXd y = VectorXd::Zero(n);
  split.labeled.scatter(split.y_labeled, y);
  VectorXd yu = VectorXd::Zero(nu);
  res.diagnostics.converged = false;
  for (int it = 1; it <= budget.max_iterations; ++it) {
    VectorXd next = alpha * split.unlabeled.gather(apply_normalized_adjacency(g, y));
    const double change = rel_change(next, yu);
    yu = std::move(next);
    split.unlabeled.scatter(yu, y);
    res.diagnostics.iterations = it;
    res.diagnostics.final_change = change;
    if (change < budget.rel_change_tolerance) {
      res.diagnostics.converged = true;
      break;
    }
  }
  res.values = std::move(yu);
  return res;
}

PropagationResult label_propagation_unconstrained(const Graph& g, const VectorXd& f0, double alpha,
                                                  const PropagationBudget& budget) {
  check_budget(budget);
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("label_propagation_unconstrained: alpha must lie in [0, 1)");
  }
  if (f0.size() != g.num_nodes()) {
    throw std::invalid_argument("label_propagation_unconstrained: length mismatch");
  }
  PropagationResult res;
  if (budget.executor == Executor::kConjugateGradient) {
    const double omega = alpha / (1.0 - alpha);
    LinearOperator op{g.num_nodes(), [&](const VectorXd& v) -> VectorXd {
                        return v + omega * apply_normalized_laplacian(g, v);
                      }};
    CgConfig cfg;
    cfg.rel_tolerance = budget.rel_change_tolerance;
    cfg.max_iterations = budget.max_iterations;
    CgResult cg = conjugate_gradient_run(op, f0, cfg);
    res.values = std::move(cg.x);
    res.diagnostics = {cg.iterations, cg.rel_residual, cg.converged};
    return res;
  }
  const VectorXd base = (1.0 - alpha) * f0;
  VectorXd f = f0;
  res.diagnostics.converged = false;
  for (int it = 1; it <= budget.max_iterations; ++it) {
    VectorXd next = base + alpha * apply_normalized_adjacency(g, f);
    const double change = rel_change(next, f);
    f = std::move(next);
    res.diagnostics.iterations = it;
    res.diagnostics.final_change = change;
    if (change < budget.rel_change_tolerance) {
      res.diagnostics.converged = true;
      break;
    }
  }
  res.values = std::move(f);
  return res;
}

MatrixPropagationResult label_propagation_unconstrained(const Graph& g, const MatrixXd& f0,
                                                        double alpha,
                                                        const PropagationBudget& budget) {
  if (f0.rows() != g.num_nodes()) {
    throw std::invalid_argument("label_propagation_unconstrained: row count mismatch");
  }
  MatrixPropagationResult res;
  res.values.resize(f0.rows(), f0.cols());
  std::vector<Diagnostics> diags(static_cast<std::size_t>(f0.cols()));
  parallel_for(diags.size(), [&](std::size_t c) {
    PropagationResult col = label_propagation_unconstrained(g, VectorXd(f0.col(c)), alpha, budget);
    res.values.col(c) = col.values;
    diags[c] = col.diagnostics;
  });
  for (const auto& d : diags) res.diagnostics.merge(d);
  return res;
}

std::vector<int> label_propagation_multiclass(const Graph& g, const NodeIndexSet& labeled,
                                              const std::vector<int>& labels_L, int num_classes,
                                              const SmoothingParam& s,
                                              const PropagationBudget& budget) {
  if (num_classes < 1) throw std::invalid_argument("multiclass LP: num_classes must be >= 1");
  if (labels_L.size() != labeled.size()) {
    throw std::invalid_argument("multiclass LP: label count differs from |L|");
  }
  for (int c : labels_L) {
    if (c < 0 || c >= num_classes) throw std::invalid_argument("multiclass LP: label out of range");
  }
  const Index nl = static_cast<Index>(labeled.size());
  SplitSpec split = SplitSpec::from_labeled(labeled, VectorXd::Zero(nl));
  const Index nu = static_cast<Index>(split.unlabeled.size());
  MatrixXd scores(nu, num_classes);
  for (int c = 0; c < num_classes; ++c) {
    VectorXd onehot(nl);
    for (Index i = 0; i < nl; ++i) onehot(i) = labels_L[i] == c ? 1.0 : 0.0;
    scores.col(c) = label_propagation(g, split.with_labels(onehot), s, budget).values;
  }
  std::vector<int> out(static_cast<std::size_t>(nu));
  for (Index u = 0; u < nu; ++u) {
    int best = 0;
    for (int c = 1; c < num_classes; ++c) {
      if (scores(u, c) > scores(u, best)) best = c;
    }
    out[u] = best;
  }
  return out;
}

MatrixPropagationResult smooth_features(const Graph& g, const MatrixXd& X, const SmoothingParam& s,
                                        const PropagationBudget& budget) {
  return label_propagation_unconstrained(g, X, s.alpha(), budget);
}

MatrixXd sgc_features(const Graph& g, const MatrixXd& X, int K) {
  if (K < 0) throw std::invalid_argument("sgc_features: K must be >= 0");
  MatrixXd out = X;
  for (int k = 0; k < K; ++k) out = apply_selfloop_adjacency(g, out);
  return out;
}

RegressionCoefficients ols(const MatrixXd& features, const VectorXd& targets) {
  if (features.rows() != targets.size()) throw std::invalid_argument("ols: row count mismatch");
  if (features.rows() < 1) throw std::invalid_argument("ols: need at least one row");
  RegressionCoefficients out;
  if (features.cols() == 0) {
    out.beta.resize(0);
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(features);
  out.beta = cod.solve(targets);
  return out;
}

VectorXd regress_all_nodes(const MatrixXd& features, const SplitSpec& split,
                           RegressionCoefficients* coef) {
  if (features.rows() != split.num_nodes()) {
    throw std::invalid_argument("regression: feature rows differ from node count");
  }
  RegressionCoefficients c = ols(split.labeled.gather_rows(features), split.y_labeled);
  VectorXd pred = features.cols() == 0 ? VectorXd(VectorXd::Zero(features.rows()))
                                       : VectorXd(features * c.beta);
  if (coef) *coef = std::move(c);
  return pred;
}

VectorXd lr_predict(const MatrixXd& X, const SplitSpec& split) {
  return split.unlabeled.gather(regress_all_nodes(X, split));
}

VectorXd lgc_predict(const Graph& g, const MatrixXd& X, const SplitSpec& split,
                     const SmoothingParam& s, const PropagationBudget& budget, Diagnostics* diag) {
  check_split(g, split);
  MatrixPropagationResult sm = smooth_features(g, X, s, budget);
  if (diag) diag->merge(sm.diagnostics);
  return split.unlabeled.gather(regress_all_nodes(sm.values, split));
}

VectorXd lgc_predict_fixed_beta(const Graph& g, const MatrixXd& X, const VectorXd& beta,
                                const SplitSpec& split, const SmoothingParam& s,
                                const PropagationBudget& budget) {
  if (beta.size() != X.cols()) throw std::invalid_argument("lgc_predict_fixed_beta: beta length");
  const MatrixXd Xbar = smooth_features(g, X, s, budget).values;
  return split.unlabeled.gather_rows(Xbar) * beta;
}

VectorXd sgc_predict(const Graph& g, const MatrixXd& X, const SplitSpec& split, int K) {
  check_split(g, split);
  return split.unlabeled.gather(regress_all_nodes(sgc_features(g, X, K), split));
}

VectorXd residual_propagation(const Graph& g, const VectorXd& base_pred, const SplitSpec& split,
                              const SmoothingParam& s, const PropagationBudget& budget,
                              Diagnostics* diag) {
  check_split(g, split);
  if (base_pred.size() != g.num_nodes()) {
    throw std::invalid_argument("residual_propagation: base prediction must cover all nodes");
  }
  const VectorXd residual = split.y_labeled - split.labeled.gather(base_pred);
  PropagationResult lp = label_propagation(g, split.with_labels(residual), s, budget);
  if (diag) diag->merge(lp.diagnostics);
  return split.unlabeled.gather(base_pred) + lp.values;
}

VectorXd lgc_rp_predict(const Graph& g, const MatrixXd& X, const SplitSpec& split,
                        const SmoothingParam& s, const PropagationBudget& budget,
                        std::optional<SmoothingParam> rp_smoothing, Diagnostics* diag) {
  check_split(g, split);
  MatrixPropagationResult sm = smooth_features(g, X, s, budget);
  if (diag) diag->merge(sm.diagnostics);
  const VectorXd base = regress_all_nodes(sm.values, split);
  return residual_propagation(g, base, split, rp_smoothing.value_or(s), budget, diag);
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kLP: return "LP";
    case Algorithm::kLR: return "LR";
    case Algorithm::kLGC: return "LGC";
    case Algorithm::kSGC: return "SGC";
    case Algorithm::kLGCRP: return "LGC/RP";
    case Algorithm::kSGCRP: return "SGC/RP";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  std::string up;
  for (char c : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (Algorithm a : {Algorithm::kLP, Algorithm::kLR, Algorithm::kLGC, Algorithm::kSGC,
                      Algorithm::kLGCRP, Algorithm::kSGCRP}) {
    if (algorithm_name(a) == up) return a;
  }
  throw ConfigError("unknown algorithm '" + name + "' (expected LP, LR, LGC, SGC, LGC/RP, SGC/RP)");
}

bool algorithm_uses_omega(Algorithm a) {
  return a == Algorithm::kLP || a == Algorithm::kLGC || a == Algorithm::kLGCRP ||
         a == Algorithm::kSGCRP;
}

bool algorithm_uses_k(Algorithm a) { return a == Algorithm::kSGC || a == Algorithm::kSGCRP; }

VectorXd predict(Algorithm alg, const Graph& g, const MatrixXd& X, const SplitSpec& split,
                 const Hyperparameters& hp, const PropagationBudget& budget, Diagnostics* diag) {
  const auto rp = [&] {
    return SmoothingParam::from_omega(std::isnan(hp.rp_omega) ? hp.omega : hp.rp_omega);
  };
  switch (alg) {
    case Algorithm::kLP: {
      PropagationResult r = label_propagation(g, split, SmoothingParam::from_omega(hp.omega), budget);
      if (diag) diag->merge(r.diagnostics);
      return r.values;
    }
    case Algorithm::kLR:
      return lr_predict(X, split);
    case Algorithm::kLGC:
      return lgc_predict(g, X, split, SmoothingParam::from_omega(hp.omega), budget, diag);
    case Algorithm::kSGC:
      return sgc_predict(g, X, split, hp.K);
    case Algorithm::kLGCRP:
      return lgc_rp_predict(g, X, split, SmoothingParam::from_omega(hp.omega), budget, rp(), diag);
    case Algorithm::kSGCRP: {
      const VectorXd base = regress_all_nodes(sgc_features(g, X, hp.K), split);
      return residual_propagation(g, base, split, rp(), budget, diag);
    }
  }
  throw std::invalid_argument("predict: unknown algorithm");
}

bool algorithm_is_inductive(Algorithm a) {
  return a == Algorithm::kLR || a == Algorithm::kLGC || a == Algorithm::kSGC;
}

VectorXd predict_inductive(Algorithm alg, const Graph& g_train, const MatrixXd& X_train,
                           const SplitSpec& train, const Graph& g_test, const MatrixXd& X_test,
                           const Hyperparameters& hp, const PropagationBudget& budget) {
  if (!algorithm_is_inductive(alg)) {
    throw ConfigError(algorithm_name(alg) + " needs labels on the test graph; inductive runs support LR, LGC and SGC");
  }
  if (X_train.cols() != X_test.cols()) {
    throw std::invalid_argument("predict_inductive: feature counts differ between graphs");
  }
  const auto transform = [&](const Graph& g, const MatrixXd& X) -> MatrixXd {
    switch (alg) {
      case Algorithm::kLGC:
        return smooth_features(g, X, SmoothingParam::from_omega(hp.omega), budget).values;
      case Algorithm::kSGC:
        return sgc_features(g, X, hp.K);
      default:
        return X;
    }
  };
  const MatrixXd f_train = transform(g_train, X_train);
  if (f_train.rows() != train.num_nodes()) {
    throw std::invalid_argument("predict_inductive: training split does not match the training graph");
  }
  const RegressionCoefficients coef = ols(train.labeled.gather_rows(f_train), train.y_labeled);
  return transform(g_test, X_test) * coef.beta;
}

std::vector<int> classify_by_threshold(const VectorXd& scores, double threshold) {
  std::vector<int> out(static_cast<std::size_t>(scores.size()));
  for (Index i = 0; i < scores.size(); ++i) out[i] = scores(i) >= threshold ? 1 : 0;
  return out;
}

ThresholdChoice tune_threshold(const VectorXd& scores, const std::vector<int>& labels) {
  if (scores.size() == 0) throw std::invalid_argument("tune_threshold: empty validation set");
  if (static_cast<std::size_t>(scores.size()) != labels.size()) {
    throw std::invalid_argument("tune_threshold: length mismatch");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("tune_threshold: labels must be 0/1");
  }
  std::vector<double> s(scores.data(), scores.data() + scores.size());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<double> candidates{s.front()};
  for (std::size_t i = 0; i + 1 < s.size(); ++i) candidates.push_back(0.5 * (s[i] + s[i + 1]));
  ThresholdChoice best{candidates.front(), -1.0};
  for (double t : candidates) {
    const double f = f1_score(classify_by_threshold(scores, t), labels, 1);
    if (f > best.f1) best = {t, f};
  }
  return best;
}

}  // namespace gmrf
