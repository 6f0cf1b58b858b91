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

#include <doctest.h>

#include <cmath>

#include "gmrf/algorithms.hpp"
#include "gmrf/error.hpp"
#include "gmrf/eval.hpp"
#include "gmrf/gmrf.hpp"
#include "gmrf/linalg.hpp"
#include "gmrf/metrics.hpp"
#include "support/oracles.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using gmrf::Edge;
using gmrf::Executor;
using gmrf::Graph;
using gmrf::NodeIndexSet;
using gmrf::PropagationBudget;
using gmrf::SmoothingParam;
using gmrf::SplitSpec;

namespace {

Graph path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return Graph::from_edges(n, e);
}

Graph ring(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, 1.0});
  return Graph::from_edges(n, e);
}

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

PropagationBudget budget_for(Executor e) {
  PropagationBudget b;
  b.executor = e;
  b.max_iterations = 5000;
  b.rel_change_tolerance = 1e-12;
  return b;
}

std::vector<int> every_other(int n, int offset = 0) {
  std::vector<int> L;
  for (int i = offset; i < n; i += 3) L.push_back(i);
  return L;
}

struct Instance {
  std::vector<Edge> edges;
  Graph g;
  MatrixXd N;
};

Instance random_instance(int n, std::uint64_t seed) {
  Instance inst;
  inst.edges = oracle::random_edges(n, 0.1, seed, true);
  inst.g = Graph::from_edges(n, inst.edges);
  inst.N = oracle::laplacian(oracle::adjacency(n, inst.edges));
  return inst;
}

}  // namespace

TEST_CASE("smoothing parameter views") {
  CHECK(SmoothingParam::from_omega(0.0).alpha() == 0.0);
  CHECK(SmoothingParam::from_alpha(0.0).omega() == 0.0);
  CHECK(SmoothingParam::from_omega(1.0).alpha() == 0.5);
  for (double w : {1e-3, 0.1, 0.7, 1.0, 3.0, 42.0, 999.0}) {
    const double back = SmoothingParam::from_alpha(SmoothingParam::from_omega(w).alpha()).omega();
    CHECK(std::abs(back - w) <= 1e-15 * std::max(1.0, w) * 1e3);
    const double a = SmoothingParam::from_omega(w).alpha();
    CHECK(std::abs(SmoothingParam::from_omega(SmoothingParam::from_alpha(a).omega()).alpha() - a) <= 1e-15);
  }
  double last = -1.0;
  for (double w : {0.0, 0.5, 1.0, 2.0, 10.0}) {
    CHECK(SmoothingParam::from_omega(w).alpha() > last);
    last = SmoothingParam::from_omega(w).alpha();
  }
  CHECK_THROWS_AS(SmoothingParam::from_omega(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothingParam::from_alpha(1.0), std::invalid_argument);
  CHECK_THROWS_AS(SmoothingParam::from_omega(std::nan("")), std::invalid_argument);
}

TEST_CASE("label propagation small examples") {
  for (auto ex : {Executor::kFixedPoint, Executor::kConjugateGradient}) {
    const Graph g = path(2);
    const SplitSpec split = SplitSpec::from_labeled(NodeIndexSet({1}, 2), vec({1.0}));
    for (double w : {0.3, 1.0, 7.0}) {
      const auto r = gmrf::label_propagation(g, split, SmoothingParam::from_omega(w), budget_for(ex));
      CHECK(r.values(0) == doctest::Approx(w / (1.0 + w)).epsilon(1e-10));
      CHECK(r.diagnostics.converged);
    }
    const auto zero = gmrf::label_propagation(ring(6), SplitSpec::from_labeled(NodeIndexSet({0, 3}, 6), vec({1, -2})),
                                              SmoothingParam::from_omega(0.0), budget_for(ex));
    CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(gmrf::label_propagation(path(3), SplitSpec::from_labeled(NodeIndexSet({}, 3), VectorXd(0)),
                                          SmoothingParam::from_omega(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(gmrf::label_propagation(path(4), SplitSpec::from_labeled(NodeIndexSet({0}, 3), vec({1})),
                                          SmoothingParam::from_omega(1.0)),
                  std::invalid_argument);
}

TEST_CASE("label propagation equals the dense conditional mean") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Instance inst = random_instance(50, seed);
    const std::vector<int> L = every_other(50, static_cast<int>(seed % 3));
    const VectorXd y = VectorXd::Random(50);
    const SplitSpec split = SplitSpec::from_outcome(NodeIndexSet(L, 50), y);
    for (double w : {0.2, 1.0, 9.0}) {
      const VectorXd expect = oracle::lp_closed_form(inst.N, w, L, split.y_labeled);
      for (auto ex : {Executor::kFixedPoint, Executor::kConjugateGradient}) {
        const auto r = gmrf::label_propagation(inst.g, split, SmoothingParam::from_omega(w), budget_for(ex));
        CHECK((r.values - expect).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
}

TEST_CASE("label propagation iterates contract geometrically") {
  const Instance inst = random_instance(120, 11);
  const std::vector<int> L = every_other(120);
  const SplitSpec split = SplitSpec::from_outcome(NodeIndexSet(L, 120), VectorXd::Random(120));
  for (double alpha : {0.5, 0.9}) {
    const SmoothingParam s = SmoothingParam::from_alpha(alpha);
    PropagationBudget b;
    b.rel_change_tolerance = 1e-300;
    double prev = 0.0;
    for (int t = 10; t <= 30; ++t) {
      b.max_iterations = t;
      const auto r = gmrf::label_propagation(inst.g, split, s, b);
      CHECK_FALSE(r.diagnostics.converged);
      CHECK(r.diagnostics.iterations == t);
      if (t > 10) CHECK(r.diagnostics.final_change / prev < alpha + 0.05);
      prev = r.diagnostics.final_change;
    }
  }
}

TEST_CASE("label propagation reports an exhausted budget") {
  const Instance inst = random_instance(60, 2);
  const SplitSpec split = SplitSpec::from_outcome(NodeIndexSet(every_other(60), 60), VectorXd::Random(60));
  PropagationBudget b;
  b.max_iterations = 3;
  const auto r = gmrf::label_propagation(inst.g, split, SmoothingParam::from_alpha(0.99), b);
  CHECK_FALSE(r.diagnostics.converged);
  CHECK(r.diagnostics.iterations == 3);
  CHECK(r.values.allFinite());
}

TEST_CASE("unconstrained propagation") {
  const VectorXd f0 = vec({1.0, 0.0});
  for (auto ex : {Executor::kFixedPoint, Executor::kConjugateGradient}) {
    const Graph g = path(2);
    MatrixXd S(2, 2);
    S << 0, 1, 1, 0;
    const VectorXd expect = 0.5 * (MatrixXd::Identity(2, 2) - 0.5 * S).inverse() * f0;
    const auto r = gmrf::label_propagation_unconstrained(g, f0, 0.5, budget_for(ex));
    CHECK((r.values - expect).norm() < 1e-10);
    CHECK(r.values(0) == doctest::Approx(2.0 / 3.0));
    CHECK(r.values(1) == doctest::Approx(1.0 / 3.0));

    CHECK(gmrf::label_propagation_unconstrained(g, f0, 0.0, budget_for(ex)).values == f0);

    // Edgeless: S = 0, the fixed point is (1 - alpha) f0.
    const Graph e = Graph::from_edges(3, std::vector<Edge>{});
    const VectorXd f = vec({1, -2, 3});
    const auto re = gmrf::label_propagation_unconstrained(e, f, 0.8, budget_for(ex));
    CHECK((re.values - 0.2 * f).norm() < 1e-12);
  }
  CHECK_THROWS_AS(gmrf::label_propagation_unconstrained(path(2), f0, 1.0), std::invalid_argument);
}

TEST_CASE("feature smoothing") {
  const Graph g = path(2);
  MatrixXd x(2, 1);
  x << 1, 0;
  for (auto ex : {Executor::kFixedPoint, Executor::kConjugateGradient}) {
    const MatrixXd xb = gmrf::smooth_features(g, x, SmoothingParam::from_omega(0.5), budget_for(ex)).values;
    CHECK(xb(0, 0) == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(xb(1, 0) == doctest::Approx(0.25).epsilon(1e-10));
  }
  const MatrixXd X = MatrixXd::Random(10, 3);
  CHECK(gmrf::smooth_features(ring(10), X, SmoothingParam::from_omega(0.0)).values == X);
  const MatrixXd c = MatrixXd::Constant(10, 1, 2.5);
  CHECK((gmrf::smooth_features(ring(10), c, SmoothingParam::from_omega(4.0)).values - c).norm() < 1e-10);
}

TEST_CASE("feature smoothing equals the dense resolvent") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Instance inst = random_instance(80, seed + 20);
    const MatrixXd X = MatrixXd::Random(80, 3);
    for (double w : {0.5, 3.0, 20.0}) {
      const MatrixXd expect = (MatrixXd::Identity(80, 80) + w * inst.N).llt().solve(X);
      for (auto ex : {Executor::kFixedPoint, Executor::kConjugateGradient}) {
        const MatrixXd got = gmrf::smooth_features(inst.g, X, SmoothingParam::from_omega(w), budget_for(ex)).values;
        CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
}

TEST_CASE("truncated Neumann series approaches the smoothed features") {
  const Instance inst = random_instance(60, 31);
  const MatrixXd X = MatrixXd::Random(60, 2);
  const double alpha = 0.8;
  const MatrixXd exact = gmrf::smooth_features(inst.g, X, SmoothingParam::from_alpha(alpha), budget_for(Executor::kConjugateGradient)).values;
  MatrixXd term = X;
  MatrixXd sum = (1.0 - alpha) * X;
  for (int T = 1; T <= 40; ++T) {
    term = alpha * gmrf::apply_normalized_adjacency(inst.g, term);
    sum += (1.0 - alpha) * term;
    const double bound = std::pow(alpha, T + 1) / (1.0 - alpha) * X.norm();
    CHECK((sum - exact).norm() <= bound + 1e-10);
  }
}

TEST_CASE("ordinary least squares") {
  const VectorXd t = vec({1, 2, 3});
  CHECK((gmrf::ols(MatrixXd::Identity(3, 3), t).beta - t).norm() < 1e-14);

  MatrixXd F(4, 2);
  F << 1, 1, 2, 2, -1, -1, 0.5, 0.5;
  const VectorXd y = F.col(0) * 3.0;
  const auto c = gmrf::ols(F, y);
  CHECK(c.beta(0) == doctest::Approx(1.5));
  CHECK(c.beta(1) == doctest::Approx(1.5));
  CHECK((c.beta - F.completeOrthogonalDecomposition().pseudoInverse() * y).norm() < 1e-12);
  CHECK_FALSE(c.intercept.has_value());

  const MatrixXd G = MatrixXd::Random(30, 4);
  const VectorXd beta = vec({1, -2, 0.5, 3});
  const auto fit = gmrf::ols(G, G * beta);
  CHECK((G * fit.beta - G * beta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(gmrf::ols(G, VectorXd::Ones(3)), std::invalid_argument);
}

TEST_CASE("LGC reduces to LR without graph information") {
  const MatrixXd X = MatrixXd::Random(40, 3);
  const VectorXd y = X * vec({1, 0.5, -1}) + 0.1 * VectorXd::Random(40);
  const SplitSpec split = SplitSpec::from_outcome(NodeIndexSet(every_other(40), 40), y);
  const VectorXd lr = gmrf::lr_predict(X, split);
  const Graph e = Graph::from_edges(40, std::vector<Edge>{});
  // On an edgeless graph smoothing scales every column by 1 - alpha, which OLS absorbs.
  CHECK((gmrf::lgc_predict(e, X, split, SmoothingParam::from_omega(3.0)) - lr).cwiseAbs().maxCoeff() < 1e-10);
  const Instance inst = random_instance(40, 1);
  CHECK((gmrf::lgc_predict(inst.g, X, split, SmoothingParam::from_omega(0.0)) - lr).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((gmrf::sgc_predict(inst.g, X, split, 0) - lr).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(lr.size() == static_cast<Eigen::Index>(split.unlabeled.size()));
}

TEST_CASE("LGC with the true smoothing beats LR on model samples") {
  const Graph g = gmrf::watts_strogatz(1000, 10, 0.1, 17);
  const gmrf::GmrfParams params = gmrf::synthetic_params(4, 10.0, 17);
  const auto a = gmrf::AttributeMatrix::centered(gmrf::sample(params, g, 17).values);
  const auto L = gmrf::random_split(1000, 0.3, 17);
  const SplitSpec split = SplitSpec::from_outcome(L, a.outcome());
  const VectorXd yu = split.unlabeled.gather(a.outcome());
  const double w = params.omega(4);
  const double r2_lgc = gmrf::r_squared(gmrf::lgc_predict(g, a.features(), split, SmoothingParam::from_omega(w)), yu);
  const double r2_lr = gmrf::r_squared(gmrf::lr_predict(a.features(), split), yu);
  CHECK(r2_lgc > r2_lr);
}

TEST_CASE("SGC features") {
  const Graph g = path(2);
  MatrixXd X(2, 2);
  X << 1, 4, 3, -2;
  for (int K = 1; K <= 4; ++K) {
    const MatrixXd xt = gmrf::sgc_features(g, X, K);
    CHECK((xt.row(0) - xt.row(1)).norm() < 1e-14);
    CHECK(xt(0, 0) == doctest::Approx(2.0));
    CHECK(xt(0, 1) == doctest::Approx(1.0));
  }
  CHECK(gmrf::sgc_features(g, X, 0) == X);
  CHECK_THROWS_AS(gmrf::sgc_features(g, X, -1), std::invalid_argument);

  // Dense S~^K oracle.
  const Instance inst = random_instance(30, 5);
  const MatrixXd St = oracle::selfloop_adjacency(oracle::adjacency(30, inst.edges));
  const MatrixXd Y = MatrixXd::Random(30, 3);
  for (int K = 0; K <= 5; ++K) {
    MatrixXd expect = Y;
    for (int k = 0; k < K; ++k) expect = St * expect;
    CHECK((gmrf::sgc_features(inst.g, Y, K) - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("deep SGC features collapse onto the dominant eigenvector") {
  const Graph g = gmrf::watts_strogatz(60, 6, 0.2, 3);
  const VectorXd dominant = (g.degree().array() + 1.0).sqrt().matrix().normalized();
  const MatrixXd X = MatrixXd::Random(60, 3);
  const MatrixXd xt = gmrf::sgc_features(g, X, 400);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(xt.col(c).normalized().dot(dominant)) > 1.0 - 1e-8);
  }
}

TEST_CASE("residual propagation") {
  const Instance inst = random_instance(50, 7);
  const std::vector<int> L = every_other(50, 1);
  const VectorXd y = VectorXd::Random(50);
  const SplitSpec split = SplitSpec::from_outcome(NodeIndexSet(L, 50), y);
  const SmoothingParam s = SmoothingParam::from_omega(2.0);
  const auto b = budget_for(Executor::kFixedPoint);

  // Zero residuals on L: output is the base prediction on U.
  VectorXd base = VectorXd::Random(50);
  for (int u : L) base(u) = y(u);
  CHECK((gmrf::residual_propagation(inst.g, base, split, s, b) - split.unlabeled.gather(base)).cwiseAbs().maxCoeff() < 1e-14);

  // Zero base prediction: plain LP.
  CHECK((gmrf::residual_propagation(inst.g, VectorXd::Zero(50), split, s, b) -
         gmrf::label_propagation(inst.g, split, s, b).values).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(gmrf::residual_propagation(inst.g, VectorXd::Zero(49), split, s, b), std::invalid_argument);
}

TEST_CASE("LGC/RP equals its one-shot linear form") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = random_instance(50, seed + 40);
    const std::vector<int> L = every_other(50, static_cast<int>(seed % 3));
    const MatrixXd X = MatrixXd::Random(50, 3);
    const VectorXd y = X * vec({0.5, -1, 2}) + VectorXd::Random(50);
    const SplitSpec split = SplitSpec::from_outcome(NodeIndexSet(L, 50), y);
    const double w = 1.5;
    const auto b = budget_for(Executor::kConjugateGradient);
    const MatrixXd Xbar = (MatrixXd::Identity(50, 50) + w * inst.N).llt().solve(X);
    const VectorXd beta = gmrf::ols(oracle::sub(Xbar, L, {0, 1, 2}), split.y_labeled).beta;
    const VectorXd expect = oracle::lgcrp_linear(inst.N, w, Xbar, beta, L, split.y_labeled);
    const VectorXd got = gmrf::lgc_rp_predict(inst.g, X, split, SmoothingParam::from_omega(w), b);
    CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("LGC/RP degenerates to LGC and to LP") {
  const Instance inst = random_instance(40, 9);
  const std::vector<int> L = every_other(40);
  const MatrixXd X = MatrixXd::Random(40, 2);
  const SmoothingParam s = SmoothingParam::from_omega(1.0);
  const auto b = budget_for(Executor::kConjugateGradient);

  // Targets exactly in the span of the smoothed features on L: zero residuals.
  const MatrixXd Xbar = gmrf::smooth_features(inst.g, X, s, b).values;
  const VectorXd y = Xbar * vec({1.0, -0.5});
  const SplitSpec split = SplitSpec::from_outcome(NodeIndexSet(L, 40), y);
  CHECK((gmrf::lgc_rp_predict(inst.g, X, split, s, b) - gmrf::lgc_predict(inst.g, X, split, s, b)).cwiseAbs().maxCoeff() < 1e-9);

  // Features orthogonal to the signal: beta = 0 and LGC/RP is LP.
  const MatrixXd Z = MatrixXd::Zero(40, 1);
  const SplitSpec split2 = SplitSpec::from_outcome(NodeIndexSet(L, 40), VectorXd::Random(40));
  CHECK((gmrf::lgc_rp_predict(inst.g, Z, split2, s, b) - gmrf::label_propagation(inst.g, split2, s, b).values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("LGC/RP with the model coefficients is the exact conditional mean") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = random_instance(30, seed + 60);
    const gmrf::GmrfParams params = gmrf::synthetic_params(2, 3.0, seed);
    const auto a = gmrf::sample(params, inst.g, seed);
    const std::vector<int> L = every_other(30, static_cast<int>(seed % 3));
    const SplitSpec split = SplitSpec::from_outcome(NodeIndexSet(L, 30), a.outcome());
    const MatrixXd& H = params.H();
    const VectorXd beta = -H.block(0, 2, 2, 1) / H(2, 2);
    const SmoothingParam s = SmoothingParam::from_omega(params.omega(2));
    const auto b = budget_for(Executor::kConjugateGradient);
    const VectorXd base = gmrf::smooth_features(inst.g, a.features(), s, b).values * beta;
    const VectorXd got = gmrf::residual_propagation(inst.g, base, split, s, b);

    // Observe every feature entry and y_L in the joint vec(A) system.
    std::vector<int> observed;
    for (int i = 0; i < 60; ++i) observed.push_back(i);
    for (int u : L) observed.push_back(60 + u);
    const VectorXd va = Eigen::Map<const VectorXd>(a.values.data(), 90);
    const auto cond = gmrf::dense_conditional_gaussian(VectorXd::Zero(90), gmrf::dense_precision(params, inst.g),
                                                       NodeIndexSet(observed, 90),
                                                       oracle::sub(va, observed));
    CHECK((got - cond.mean).cwiseAbs().maxCoeff() < 1e-8);

    const VectorXd fixed = gmrf::lgc_predict_fixed_beta(inst.g, a.features(), beta, split, s, b);
    CHECK((fixed - split.unlabeled.gather(base)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("algorithm names and dispatch") {
  for (auto a : {gmrf::Algorithm::kLP, gmrf::Algorithm::kLR, gmrf::Algorithm::kLGC, gmrf::Algorithm::kSGC,
                 gmrf::Algorithm::kLGCRP, gmrf::Algorithm::kSGCRP}) {
    CHECK(gmrf::parse_algorithm(gmrf::algorithm_name(a)) == a);
  }
  CHECK(gmrf::parse_algorithm("lgc/rp") == gmrf::Algorithm::kLGCRP);
  CHECK_THROWS_AS(gmrf::parse_algorithm("GCN"), gmrf::ConfigError);
  CHECK(gmrf::algorithm_uses_omega(gmrf::Algorithm::kLP));
  CHECK_FALSE(gmrf::algorithm_uses_omega(gmrf::Algorithm::kLR));
  CHECK(gmrf::algorithm_uses_k(gmrf::Algorithm::kSGCRP));
  CHECK_FALSE(gmrf::algorithm_uses_k(gmrf::Algorithm::kLGC));

  const Instance inst = random_instance(30, 3);
  const MatrixXd X = MatrixXd::Random(30, 2);
  const SplitSpec split = SplitSpec::from_outcome(NodeIndexSet(every_other(30), 30), VectorXd::Random(30));
  gmrf::Hyperparameters hp;
  hp.omega = 2.0;
  hp.K = 3;
  const auto s = SmoothingParam::from_omega(2.0);
  CHECK(gmrf::predict(gmrf::Algorithm::kLGC, inst.g, X, split, hp) == gmrf::lgc_predict(inst.g, X, split, s));
  CHECK(gmrf::predict(gmrf::Algorithm::kSGC, inst.g, X, split, hp) == gmrf::sgc_predict(inst.g, X, split, 3));
  CHECK(gmrf::predict(gmrf::Algorithm::kLP, inst.g, MatrixXd(30, 0), split, hp) ==
        gmrf::label_propagation(inst.g, split, s).values);
  const VectorXd sgcrp = gmrf::predict(gmrf::Algorithm::kSGCRP, inst.g, X, split, hp);
  const VectorXd base = gmrf::sgc_features(inst.g, X, 3) * gmrf::ols(split.labeled.gather_rows(gmrf::sgc_features(inst.g, X, 3)), split.y_labeled).beta;
  CHECK((sgcrp - gmrf::residual_propagation(inst.g, base, split, s)).cwiseAbs().maxCoeff() < 1e-12);
  hp.rp_omega = 0.5;
  CHECK((gmrf::predict(gmrf::Algorithm::kLGCRP, inst.g, X, split, hp) -
         gmrf::lgc_rp_predict(inst.g, X, split, s, {}, SmoothingParam::from_omega(0.5))).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("multiclass label propagation") {
  // Two triangles joined by one edge, one label in each.
  const Graph g = Graph::from_edges(6, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
  const auto pred = gmrf::label_propagation_multiclass(g, NodeIndexSet({0, 5}, 6), {1, 0}, 2,
                                                       SmoothingParam::from_omega(5.0));
  CHECK(pred == std::vector<int>{1, 1, 0, 0});
  // Ties go to the lowest class.
  const auto tie = gmrf::label_propagation_multiclass(path(3), NodeIndexSet({0, 2}, 3), {1, 0}, 2,
                                                      SmoothingParam::from_omega(1.0));
  CHECK(tie == std::vector<int>{0});
  CHECK_THROWS_AS(gmrf::label_propagation_multiclass(path(3), NodeIndexSet({0}, 3), {2}, 2,
                                                     SmoothingParam::from_omega(1.0)),
                  std::invalid_argument);
}

TEST_CASE("threshold classification and tuning") {
  CHECK(gmrf::classify_by_threshold(vec({0.1, 0.5, 0.9}), 0.5) == std::vector<int>{0, 1, 1});

  const auto sep = gmrf::tune_threshold(vec({0.1, 0.2, 0.8, 0.9}), {0, 0, 1, 1});
  CHECK(sep.f1 == 1.0);
  CHECK(sep.threshold > 0.2);
  CHECK(sep.threshold < 0.8);

  const auto ones = gmrf::tune_threshold(vec({0.3, -1.0, 2.0}), {1, 1, 1});
  CHECK(ones.f1 == 1.0);
  CHECK(ones.threshold <= -1.0);

  CHECK_THROWS_AS(gmrf::tune_threshold(VectorXd(0), {}), std::invalid_argument);
  CHECK_THROWS_AS(gmrf::tune_threshold(vec({1}), {2}), std::invalid_argument);
}

TEST_CASE("threshold tuning matches exhaustive search") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = trial < 100 ? 4 : 9;
    VectorXd scores(m);
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      scores(i) = std::round(u(rng) * 4.0) / 4.0;
      labels[static_cast<std::size_t>(i)] = u(rng) > 0.0 ? 1 : 0;
    }
    // Every distinct classification is realized by thresholding at a score or above the maximum.
    double best = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double t = i < m ? scores(i) : scores.maxCoeff() + 1.0;
      best = std::max(best, gmrf::f1_score(gmrf::classify_by_threshold(scores, t), labels));
    }
    const auto choice = gmrf::tune_threshold(scores, labels);
    CHECK(choice.f1 == doctest::Approx(best).epsilon(1e-15));
    CHECK(gmrf::f1_score(gmrf::classify_by_threshold(scores, choice.threshold), labels) == choice.f1);
  }
}
