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

#include "gmrf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gmrf/csv.hpp"
#include "gmrf/error.hpp"
#include "gmrf/linalg.hpp"
#include "gmrf/parallel.hpp"
#include "gmrf/random.hpp"

namespace gmrf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Fisher-Yates with an explicit uniform draw, so the permutation only depends
// on the engine output.
std::vector<int> permutation(int n, std::uint64_t seed) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

}  // namespace

NodeIndexSet random_split(int n, double fraction, std::uint64_t seed) {
  if (n < 0 || !(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("random_split: fraction must lie in [0, 1]");
  }
  const int k = static_cast<int>(std::lround(fraction * n));
  std::vector<int> idx = permutation(n, derive_seed(seed, streams::kSplit));
  idx.resize(static_cast<std::size_t>(k));
  return NodeIndexSet::from_unsorted(std::move(idx), n);
}

std::vector<int> kfold_assignment(int count, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("kfold: need at least 2 folds");
  if (count < folds) throw std::invalid_argument("kfold: fewer items than folds");
  const std::vector<int> perm = permutation(count, derive_seed(seed, streams::kFold));
  std::vector<int> fold(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) fold[perm[i]] = i % folds;
  return fold;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi >= lo) || count < 1) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> out;
  if (count == 1) return {lo};
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<Hyperparameters> hyperparameter_grid(Algorithm alg, const CvPlan& plan) {
  std::vector<double> omegas = plan.omega_grid;
  std::vector<int> ks = plan.k_grid;
  std::vector<double> rps = plan.rp_omega_grid;
  std::sort(omegas.begin(), omegas.end());
  std::sort(ks.begin(), ks.end());
  std::sort(rps.begin(), rps.end());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Hyperparameters> out;
  switch (alg) {
    case Algorithm::kLR:
      out.push_back({0.0, 0, nan});
      break;
    case Algorithm::kLP:
    case Algorithm::kLGC:
      for (double w : omegas) out.push_back({w, 0, nan});
      break;
    case Algorithm::kSGC:
      for (int k : ks) out.push_back({0.0, k, nan});
      break;
    case Algorithm::kLGCRP:
      for (double w : omegas) {
        if (rps.empty()) {
          out.push_back({w, 0, nan});
        } else {
          for (double r : rps) out.push_back({w, 0, r});
        }
      }
      break;
    case Algorithm::kSGCRP: {
      const std::vector<double>& r_grid = rps.empty() ? omegas : rps;
      for (double r : r_grid) {
        for (int k : ks) out.push_back({r, k, r});
      }
      break;
    }
  }
  if (out.empty()) throw ConfigError("cross_validate: empty hyperparameter grid for " + algorithm_name(alg));
  return out;
}

CvResult cross_validate(const Graph& g, const MatrixXd& X, const SplitSpec& split, Algorithm alg,
                        const CvPlan& plan) {
  const int nl = static_cast<int>(split.labeled.size());
  if (nl < plan.folds) throw std::invalid_argument("cross_validate: |L| smaller than fold count");
  if (X.rows() != g.num_nodes()) throw std::invalid_argument("cross_validate: X row mismatch");
  const std::vector<Hyperparameters> grid = hyperparameter_grid(alg, plan);
  const std::vector<int> fold_of = kfold_assignment(nl, plan.folds, plan.seed);

  struct Fold {
    SplitSpec split;
    std::vector<Index> val_pos;  // positions of validation nodes inside split.unlabeled
    VectorXd y_val;
  };
  std::vector<Fold> folds(static_cast<std::size_t>(plan.folds));
  for (int f = 0; f < plan.folds; ++f) {
    std::vector<int> train;
    std::vector<double> y_train;
    std::vector<double> y_val;
    for (int i = 0; i < nl; ++i) {
      if (fold_of[i] == f) {
        y_val.push_back(split.y_labeled(i));
      } else {
        train.push_back(split.labeled[i]);
        y_train.push_back(split.y_labeled(i));
      }
    }
    Fold& fd = folds[f];
    fd.split = SplitSpec::from_labeled(NodeIndexSet(train, g.num_nodes()),
                                       Eigen::Map<VectorXd>(y_train.data(), static_cast<Index>(y_train.size())));
    std::vector<Index> pos_of(static_cast<std::size_t>(g.num_nodes()), -1);
    for (std::size_t t = 0; t < fd.split.unlabeled.size(); ++t) pos_of[fd.split.unlabeled[t]] = static_cast<Index>(t);
    for (int i = 0; i < nl; ++i) {
      if (fold_of[i] == f) fd.val_pos.push_back(pos_of[split.labeled[i]]);
    }
    fd.y_val = Eigen::Map<VectorXd>(y_val.data(), static_cast<Index>(y_val.size()));
  }

  // Label-independent feature transforms, shared by all folds.
  const bool smooth = alg == Algorithm::kLGC || alg == Algorithm::kLGCRP;
  const bool sgc = alg == Algorithm::kSGC || alg == Algorithm::kSGCRP;
  std::vector<double> feature_keys;
  for (const auto& hp : grid) {
    const double key = smooth ? hp.omega : (sgc ? static_cast<double>(hp.K) : 0.0);
    if (std::find(feature_keys.begin(), feature_keys.end(), key) == feature_keys.end()) {
      feature_keys.push_back(key);
    }
  }
  std::vector<MatrixXd> features(feature_keys.size());
  parallel_for(feature_keys.size(), [&](std::size_t i) {
    if (smooth) {
      features[i] = smooth_features(g, X, SmoothingParam::from_omega(feature_keys[i]), plan.budget).values;
    } else if (sgc) {
      features[i] = sgc_features(g, X, static_cast<int>(feature_keys[i]));
    } else {
      features[i] = X;
    }
  });
  auto features_for = [&](const Hyperparameters& hp) -> const MatrixXd& {
    const double key = smooth ? hp.omega : (sgc ? static_cast<double>(hp.K) : 0.0);
    const auto it = std::find(feature_keys.begin(), feature_keys.end(), key);
    return features[static_cast<std::size_t>(it - feature_keys.begin())];
  };

  auto predict_fold = [&](const Hyperparameters& hp, const Fold& fd) -> VectorXd {
    const SplitSpec& s = fd.split;
    switch (alg) {
      case Algorithm::kLP:
        return label_propagation(g, s, SmoothingParam::from_omega(hp.omega), plan.budget).values;
      case Algorithm::kLR:
      case Algorithm::kLGC:
      case Algorithm::kSGC:
        return s.unlabeled.gather(regress_all_nodes(features_for(hp), s));
      case Algorithm::kLGCRP:
      case Algorithm::kSGCRP: {
        const double w = std::isnan(hp.rp_omega) ? hp.omega : hp.rp_omega;
        const VectorXd base = regress_all_nodes(features_for(hp), s);
        return residual_propagation(g, base, s, SmoothingParam::from_omega(w), plan.budget);
      }
    }
    throw std::invalid_argument("cross_validate: unknown algorithm");
  };
  auto gather_val = [](const VectorXd& pred, const Fold& fd) {
    VectorXd out(static_cast<Index>(fd.val_pos.size()));
    for (std::size_t t = 0; t < fd.val_pos.size(); ++t) out(t) = pred(fd.val_pos[t]);
    return out;
  };
  auto to_labels = [](const VectorXd& y) {
    std::vector<int> out(static_cast<std::size_t>(y.size()));
    for (Index i = 0; i < y.size(); ++i) out[i] = y(i) >= 0.5 ? 1 : 0;
    return out;
  };

  CvResult result;
  result.grid.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t gi) {
    GridScore& gs = result.grid[gi];
    gs.hp = grid[gi];
    for (const Fold& fd : folds) {
      const VectorXd pv = gather_val(predict_fold(gs.hp, fd), fd);
      double score = std::numeric_limits<double>::quiet_NaN();
      if (plan.metric == Metric::kR2) {
        if (fd.y_val.size() >= 2 && (fd.y_val.array() - fd.y_val.mean()).square().sum() > 0.0) {
          score = r_squared(pv, fd.y_val);
        }
      } else {
        score = tune_threshold(pv, to_labels(fd.y_val)).f1;
      }
      gs.fold_scores.push_back(score);
    }
  });

  int best = -1;
  for (std::size_t gi = 0; gi < result.grid.size(); ++gi) {
    GridScore& gs = result.grid[gi];
    double sum = 0.0;
    int used = 0;
    for (double s : gs.fold_scores) {
      if (std::isnan(s)) continue;
      sum += s;
      ++used;
    }
    if (gi == 0) result.skipped_folds = plan.folds - used;
    gs.mean_score = used > 0 ? sum / used : std::numeric_limits<double>::quiet_NaN();
    if (used > 0 && (best < 0 || gs.mean_score > result.grid[best].mean_score)) {
      best = static_cast<int>(gi);
    }
  }
  if (best < 0) throw DataError("cross_validate: every fold has zero-variance validation targets");
  result.best = result.grid[best].hp;
  result.best_score = result.grid[best].mean_score;
  if (plan.metric == Metric::kF1) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (const Fold& fd : folds) {
      const VectorXd pv = gather_val(predict_fold(result.best, fd), fd);
      const auto lv = to_labels(fd.y_val);
      scores.insert(scores.end(), pv.data(), pv.data() + pv.size());
      labels.insert(labels.end(), lv.begin(), lv.end());
    }
    result.threshold =
        tune_threshold(Eigen::Map<VectorXd>(scores.data(), static_cast<Index>(scores.size())), labels)
            .threshold;
  }
  return result;
}

double r2_from_covariances(const MatrixXd& sigma_alg, const MatrixXd& sigma_0) {
  if (sigma_0.rows() != sigma_0.cols() || sigma_0.rows() < 1) {
    throw std::invalid_argument("r2_from_covariances: Sigma_0 must be square and nonempty");
  }
  const double u = static_cast<double>(sigma_0.rows());
  const double denom = sigma_0.trace() - sigma_0.sum() / u;
  if (!(denom > 0.0)) throw NumericError("r2_from_covariances: nonpositive total variance");
  const double num = sigma_alg.size() == 0 ? 0.0 : sigma_alg.trace();
  return 1.0 - num / denom;
}

namespace {

// A - B C^{-1} B^T for SPD C.
MatrixXd schur(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C) {
  if (C.rows() == 0) return A;
  Eigen::LLT<MatrixXd> llt(C);
  if (llt.info() != Eigen::Success) throw NumericError("conditional covariance: singular block");
  MatrixXd out = A - B * llt.solve(B.transpose());
  return 0.5 * (out + out.transpose());
}

}  // namespace

R2Estimator::R2Estimator(const GmrfParams& params, const Graph& g, Index max_dense_dim)
    : n_(g.num_nodes()) {
  const Index k = params.num_attributes();
  if (n_ * k > max_dense_dim) {
    throw std::invalid_argument("R2Estimator: n(p+1) = " + std::to_string(n_ * k) +
                                " exceeds the dense limit " + std::to_string(max_dense_dim));
  }
  const MatrixXd gamma = dense_precision(params, g);
  Eigen::LLT<MatrixXd> llt(gamma);
  if (llt.info() != Eigen::Success) throw NumericError("R2Estimator: precision is not SPD");
  const MatrixXd sigma = llt.solve(MatrixXd::Identity(n_ * k, n_ * k));
  const Index p = k - 1;
  sigma_yy_ = sigma.block(p * n_, p * n_, n_, n_);
  sigma_yy_ = (0.5 * (sigma_yy_ + sigma_yy_.transpose())).eval();
  if (p == 0) {
    sigma_y_given_x_ = sigma_yy_;
  } else {
    sigma_y_given_x_ = schur(sigma_yy_, sigma.block(p * n_, 0, n_, p * n_),
                             sigma.topLeftCorner(p * n_, p * n_));
  }
}

MatrixXd R2Estimator::marginal_covariance(const SplitSpec& split) const {
  if (split.num_nodes() != n_) throw std::invalid_argument("R2Estimator: split size mismatch");
  return submatrix(sigma_yy_, split.unlabeled, split.unlabeled);
}

MatrixXd R2Estimator::conditional_covariance(Algorithm alg, const SplitSpec& split) const {
  if (split.num_nodes() != n_) throw std::invalid_argument("R2Estimator: split size mismatch");
  const auto& U = split.unlabeled;
  const auto& L = split.labeled;
  switch (alg) {
    case Algorithm::kLP:
      return schur(submatrix(sigma_yy_, U, U), submatrix(sigma_yy_, U, L),
                   submatrix(sigma_yy_, L, L));
    case Algorithm::kLGC:
      return submatrix(sigma_y_given_x_, U, U);
    case Algorithm::kLGCRP:
      // Conditioning on Q and then on P_L equals conditioning on P_L u Q at once.
      return schur(submatrix(sigma_y_given_x_, U, U), submatrix(sigma_y_given_x_, U, L),
                   submatrix(sigma_y_given_x_, L, L));
    default:
      throw std::invalid_argument("R2Estimator: only LP, LGC and LGC/RP are supported");
  }
}

double R2Estimator::estimate(Algorithm alg, const SplitSpec& split) const {
  return r2_from_covariances(conditional_covariance(alg, split), marginal_covariance(split));
}

double estimate_r2(const GmrfParams& params, const Graph& g, const SplitSpec& split, Algorithm alg) {
  return R2Estimator(params, g).estimate(alg, split);
}

VectorXd marginalized_lp_oracle(const GmrfParams& params, const Graph& g, const SplitSpec& split) {
  const Index n = g.num_nodes();
  const Index k = params.num_attributes();
  const Index p = k - 1;
  if (split.num_nodes() != n) throw std::invalid_argument("marginalized_lp_oracle: split size");
  const MatrixXd gamma = dense_precision(params, g);
  MatrixXd gbar = gamma.block(p * n, p * n, n, n);
  if (p > 0) {
    const MatrixXd G_qq = gamma.topLeftCorner(p * n, p * n);
    const MatrixXd G_pq = gamma.block(p * n, 0, n, p * n);
    Eigen::LLT<MatrixXd> llt(G_qq);
    if (llt.info() != Eigen::Success) throw NumericError("marginalized_lp_oracle: singular Gamma_QQ");
    gbar -= G_pq * llt.solve(G_pq.transpose());
  }
  const MatrixXd G_uu = submatrix(gbar, split.unlabeled, split.unlabeled);
  const MatrixXd G_ul = submatrix(gbar, split.unlabeled, split.labeled);
  Eigen::LLT<MatrixXd> llt(G_uu);
  if (llt.info() != Eigen::Success) throw NumericError("marginalized_lp_oracle: singular block");
  return -llt.solve(G_ul * split.y_labeled);
}

double filter_response(const FilterSpec& spec, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 2.0)) {
    throw std::invalid_argument("filter_response: lambda must lie in [0, 2]");
  }
  if (spec.kind == FilterSpec::Kind::kLGC) {
    if (!(spec.omega >= 0.0)) throw std::invalid_argument("filter_response: omega must be >= 0");
    return 1.0 / (1.0 + spec.omega * lambda);
  }
  if (!(spec.degree >= 1.0)) throw std::invalid_argument("filter_response: degree must be >= 1");
  if (spec.K < 0) throw std::invalid_argument("filter_response: K must be >= 0");
  const double base = (spec.degree + 1.0 - spec.degree * lambda) / (spec.degree + 1.0);
  return std::pow(base, spec.K);
}

std::vector<double> filter_response(const FilterSpec& spec, const std::vector<double>& lambdas) {
  std::vector<double> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(filter_response(spec, l));
  return out;
}

std::string filter_response_csv(const FilterSpec& spec, const std::vector<double>& lambdas) {
  std::ostringstream os;
  os << "lambda,response\n";
  for (double l : lambdas) {
    os << csv::format_double(l) << ',' << csv::format_double(filter_response(spec, l)) << '\n';
  }
  return os.str();
}

}  // namespace gmrf
