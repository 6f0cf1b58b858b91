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
#include <filesystem>
#include <fstream>

#include "gmrf/error.hpp"
#include "gmrf/gmrf.hpp"
#include "support/oracles.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using gmrf::AttributeMatrix;
using gmrf::Edge;
using gmrf::GmrfParams;
using gmrf::Graph;

namespace {

Graph path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return Graph::from_edges(n, e);
}

Graph edgeless(int n) { return Graph::from_edges(n, std::vector<Edge>{}); }

GmrfParams scalar(double H, double h) {
  return GmrfParams(MatrixXd::Constant(1, 1, H), VectorXd::Constant(1, h));
}

GmrfParams random_params(int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  VectorXd h(k);
  for (int i = 0; i < k; ++i) h(i) = u(rng);
  return GmrfParams(oracle::random_spd(k, seed + 100, 0.5), h);
}

MatrixXd dense_gamma(const GmrfParams& p, const Graph& g, const std::vector<Edge>& edges) {
  return oracle::kron_precision(p.H(), p.h(), oracle::laplacian(oracle::adjacency(g.num_nodes(), edges)));
}

VectorXd vec(const MatrixXd& m) { return Eigen::Map<const VectorXd>(m.data(), m.size()); }

gmrf::ModelOptions with_method(gmrf::SolveMethod m) {
  gmrf::ModelOptions o;
  o.method = m;
  return o;
}

}  // namespace

TEST_CASE("params validation") {
  CHECK_NOTHROW(scalar(1.0, 1.0));
  CHECK_THROWS_AS(scalar(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(scalar(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scalar(1.0, std::nan("")), std::invalid_argument);
  MatrixXd H = MatrixXd::Identity(2, 2);
  H(0, 1) = 0.1;
  CHECK_THROWS_AS(GmrfParams(H, VectorXd::Ones(2)), std::invalid_argument);
  H(1, 0) = 0.1;
  CHECK_NOTHROW(GmrfParams(H, VectorXd::Ones(2)));
  CHECK_THROWS_AS(GmrfParams(H, VectorXd::Ones(3)), std::invalid_argument);
  H << 1, 2, 2, 1;
  CHECK_THROWS_AS(GmrfParams(H, VectorXd::Ones(2)), std::invalid_argument);
  const GmrfParams p(MatrixXd::Identity(2, 2) * 2.0, VectorXd::LinSpaced(2, 1.0, 4.0));
  CHECK(p.omega(1) == 2.0);
}

TEST_CASE("solve method resolution") {
  gmrf::ModelOptions o;
  CHECK(gmrf::resolve_method(o, 1000, 2) == gmrf::SolveMethod::kDense);
  CHECK(gmrf::resolve_method(o, 1000, 3) == gmrf::SolveMethod::kSpectral);
  CHECK(gmrf::resolve_method(o, 4000, 5) == gmrf::SolveMethod::kSpectral);
  CHECK(gmrf::resolve_method(o, 4001, 1) == gmrf::SolveMethod::kStochastic);
  o.method = gmrf::SolveMethod::kDense;
  CHECK(gmrf::resolve_method(o, 9000, 5) == gmrf::SolveMethod::kDense);
}

TEST_CASE("precision apply on small examples") {
  // p = 0 on a 2-node path: Gamma = H I + h N with N = [[1,-1],[-1,1]].
  const Graph g = path(2);
  const GmrfParams p = scalar(2.0, 3.0);
  MatrixXd expect(2, 2);
  expect << 5, -3, -3, 5;
  CHECK((gmrf::dense_precision(p, g) - expect).norm() < 1e-15);
  VectorXd v(2);
  v << 1, 0;
  CHECK((gmrf::precision_apply(p, g, v) - expect.col(0)).norm() < 1e-15);

  // Edgeless graph: N is the identity on isolated nodes, so Gamma = (H + diag(h)) (x) I.
  const GmrfParams q = random_params(3, 1);
  const Graph e = edgeless(4);
  const MatrixXd A = MatrixXd::Random(4, 3);
  const MatrixXd Hh = q.H() + MatrixXd(q.h().asDiagonal());
  CHECK((gmrf::precision_apply(q, e, A) - A * Hh).norm() < 1e-14);

  CHECK_THROWS_AS(gmrf::precision_apply(q, e, VectorXd::Ones(11)), std::invalid_argument);
  CHECK_THROWS_AS(gmrf::precision_apply(q, e, MatrixXd::Ones(4, 2)), std::invalid_argument);
}

TEST_CASE("precision apply matches the dense Kronecker sum") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto edges = oracle::random_edges(10, 0.3, seed, true);
    const Graph g = Graph::from_edges(10, edges);
    const GmrfParams p = random_params(3, seed);
    const MatrixXd G = dense_gamma(p, g, edges);
    CHECK((gmrf::dense_precision(p, g) - G).cwiseAbs().maxCoeff() < 1e-12);
    const VectorXd v = VectorXd::Random(30);
    CHECK((gmrf::precision_apply(p, g, v) - G * v).cwiseAbs().maxCoeff() < 1e-12);
    const MatrixXd A = MatrixXd::Random(10, 3);
    CHECK((vec(gmrf::precision_apply(p, g, A)) - G * vec(A)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((gmrf::precision_operator(p, g).apply(v) - G * v).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("precision is positive definite") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = Graph::from_edges(12, oracle::random_edges(12, 0.4, seed));
    const GmrfParams p = random_params(2, seed + 7);
    for (int t = 0; t < 20; ++t) {
      const VectorXd v = VectorXd::Random(24);
      CHECK(v.dot(gmrf::precision_apply(p, g, v)) > 0.0);
    }
    CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(gmrf::dense_precision(p, g)).eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("log potential") {
  const GmrfParams p = random_params(3, 2);
  const Graph g = Graph::from_edges(8, oracle::random_edges(8, 0.5, 2, true));
  CHECK(gmrf::log_potential(p, g, MatrixXd::Zero(8, 3)) == 0.0);

  const MatrixXd A = MatrixXd::Random(6, 3);
  double expect = 0.0;
  for (int u = 0; u < 6; ++u) expect += 0.5 * A.row(u) * p.H() * A.row(u).transpose();
  for (int i = 0; i < 3; ++i) expect += 0.5 * p.h()(i) * A.col(i).squaredNorm();
  CHECK(gmrf::log_potential(p, edgeless(6), A) == doctest::Approx(expect).epsilon(1e-13));

  for (int t = 0; t < 10; ++t) {
    const MatrixXd B = MatrixXd::Random(8, 3);
    const double quad = 0.5 * vec(B).dot(gmrf::precision_apply(p, g, vec(B)));
    CHECK(std::abs(gmrf::log_potential(p, g, B) - quad) < 1e-10);
  }
}

TEST_CASE("sampling an edgeless scalar model") {
  const GmrfParams p = scalar(3.0, 1.0);  // Gamma = 4 I
  const Graph g = edgeless(1000);
  double ss = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) ss += gmrf::sample(p, g, s).values.squaredNorm();
  CHECK(std::abs(ss / 10000.0 - 0.25) < 0.05 * 0.25);
}

TEST_CASE("sampling is deterministic given the seed") {
  const GmrfParams p = random_params(2, 3);
  const Graph g = path(20);
  const auto a = gmrf::sample(p, g, 42);
  const auto b = gmrf::sample(p, g, 42);
  CHECK(a.values == b.values);
  CHECK(a.values != gmrf::sample(p, g, 43).values);
  CHECK(a.values.cols() == 2);
  CHECK(a.names.size() == 2);
  CHECK_THROWS(gmrf::sample(p, g, 1, with_method(gmrf::SolveMethod::kStochastic)));
}

TEST_CASE("neighbour correlation grows with smoothing") {
  const Graph g = path(2);
  double last = 0.0;
  for (double w : {0.1, 1.0, 10.0}) {
    const MatrixXd cov = gmrf::dense_precision(scalar(1.0, w), g).inverse();
    const double corr = cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1));
    CHECK(corr > last);
    last = corr;

    double s01 = 0.0;
    double s00 = 0.0;
    double s11 = 0.0;
    for (std::uint64_t s = 0; s < 4000; ++s) {
      const MatrixXd y = gmrf::sample(scalar(1.0, w), g, s).values;
      s01 += y(0, 0) * y(1, 0);
      s00 += y(0, 0) * y(0, 0);
      s11 += y(1, 0) * y(1, 0);
    }
    CHECK(std::abs(s01 / std::sqrt(s00 * s11) - corr) < 0.05);
  }
}

TEST_CASE("empirical precision of many samples approximates Gamma") {
  const auto edges = std::vector<Edge>{{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}};
  const Graph g = Graph::from_edges(4, edges);
  MatrixXd H(2, 2);
  H << 1.0, 0.4, 0.4, 2.0;
  VectorXd h(2);
  h << 1.5, 0.5;
  const GmrfParams p(H, h);
  const MatrixXd G = dense_gamma(p, g, edges);
  for (auto method : {gmrf::SolveMethod::kDense, gmrf::SolveMethod::kSpectral}) {
    MatrixXd S = MatrixXd::Zero(8, 8);
    const int draws = 50000;
    for (int s = 0; s < draws; ++s) {
      const VectorXd v = vec(gmrf::sample(p, g, static_cast<std::uint64_t>(s), with_method(method)).values);
      S += v * v.transpose();
    }
    S /= draws;
    CHECK((S.inverse() - G).cwiseAbs().maxCoeff() < 0.05 * G.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("conditional mean matches the hand Schur complement") {
  const auto edges = std::vector<Edge>{{0, 1, 1.0}, {1, 2, 1.0}};
  const Graph g = Graph::from_edges(3, edges);
  MatrixXd H(2, 2);
  H << 1.0, -0.6, -0.6, 1.0;
  VectorXd h(2);
  h << 2.0, 0.5;
  const GmrfParams p(H, h);
  MatrixXd A(3, 2);
  A << 0.5, 9.0, -1.0, 9.0, 0.5, 9.0;
  const MatrixXd G = dense_gamma(p, g, edges);
  // Column 0 observed: mean of column 1 is -G_11^{-1} G_10 x.
  const MatrixXd G11 = G.bottomRightCorner(3, 3);
  const MatrixXd G10 = G.bottomLeftCorner(3, 3);
  const VectorXd expect = -G11.llt().solve(G10 * A.col(0));
  for (auto method : {gmrf::SolveMethod::kDense, gmrf::SolveMethod::kSpectral}) {
    const MatrixXd m = gmrf::conditional_mean_columns(p, g, A, {0}, with_method(method));
    CHECK((m.col(1) - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.col(0) == A.col(0));
  }
  const auto cond = oracle::condition_covariance_form(VectorXd::Zero(6), G.inverse(), {0, 1, 2}, A.col(0));
  CHECK((cond.mean - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dense and spectral conditional means agree") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Graph g = Graph::from_edges(15, oracle::random_edges(15, 0.3, seed, true));
    const GmrfParams p = random_params(4, seed);
    const MatrixXd A = MatrixXd::Random(15, 4);
    const std::vector<int> obs = {0, 2};
    const MatrixXd d = gmrf::conditional_mean_columns(p, g, A, obs, with_method(gmrf::SolveMethod::kDense));
    const MatrixXd s = gmrf::conditional_mean_columns(p, g, A, obs, with_method(gmrf::SolveMethod::kSpectral));
    CHECK((d - s).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("conditional sampling edge cases") {
  const Graph g = path(5);
  const GmrfParams p = random_params(3, 4);
  AttributeMatrix a{MatrixXd::Random(5, 3), {"a", "b", "c"}};
  const auto all = gmrf::sample_conditional(p, g, a, {0, 1, 2}, 1);
  CHECK(all.values == a.values);
  CHECK(all.names == a.names);

  const auto some = gmrf::sample_conditional(p, g, a, {1}, 1);
  CHECK(some.values.col(1) == a.values.col(1));
  CHECK(some.values.col(0) != a.values.col(0));

  // Nothing observed: the marginal law.
  MatrixXd S = MatrixXd::Zero(15, 15);
  const int draws = 20000;
  for (int s = 0; s < draws; ++s) {
    const VectorXd v = vec(gmrf::sample_conditional(p, g, a, {}, static_cast<std::uint64_t>(s)).values);
    S += v * v.transpose();
  }
  S /= draws;
  const MatrixXd cov = gmrf::dense_precision(p, g).inverse();
  CHECK((S - cov).cwiseAbs().maxCoeff() < 0.05 * cov.cwiseAbs().maxCoeff());
}

TEST_CASE("conditional sampling follows the conditional law") {
  const auto edges = oracle::random_edges(6, 0.5, 9);
  const Graph g = Graph::from_edges(6, edges);
  const GmrfParams p = random_params(2, 9);
  AttributeMatrix a{MatrixXd::Random(6, 2), {"x", "y"}};
  const MatrixXd G = dense_gamma(p, g, edges);
  const std::vector<int> q = {0, 1, 2, 3, 4, 5};
  const auto cond = oracle::condition_covariance_form(VectorXd::Zero(12), G.inverse(), q, a.values.col(0));
  for (auto method : {gmrf::SolveMethod::kDense, gmrf::SolveMethod::kSpectral}) {
    VectorXd m = VectorXd::Zero(6);
    MatrixXd S = MatrixXd::Zero(6, 6);
    const int draws = 20000;
    for (int s = 0; s < draws; ++s) {
      const VectorXd y = gmrf::sample_conditional(p, g, a, {0}, static_cast<std::uint64_t>(s), with_method(method)).values.col(1);
      m += y;
      S += (y - cond.mean) * (y - cond.mean).transpose();
    }
    m /= draws;
    S /= draws;
    const double scale = cond.cov.diagonal().maxCoeff();
    CHECK((m - cond.mean).cwiseAbs().maxCoeff() < 0.05 * std::sqrt(scale));
    CHECK((S - cond.cov).cwiseAbs().maxCoeff() < 0.05 * scale);
  }
}

TEST_CASE("nll on closed-form cases") {
  // Gamma = I: the value is the squared Frobenius norm.
  const Graph e = edgeless(7);
  const AttributeMatrix a{MatrixXd::Random(7, 1), {"y"}};
  CHECK(gmrf::nll(scalar(0.5, 0.5), e, a) == doctest::Approx(a.values.squaredNorm()).epsilon(1e-13));

  // Edgeless scalar model: Gamma = (H + h) I, stationary where H + h = n / a^T a.
  const double total = 7.0 / a.values.squaredNorm();
  const double h = 0.25 * total;
  const auto grad = gmrf::nll_gradient(scalar(total - h, h), e, a);
  CHECK(std::abs(grad.dH(0, 0)) < 1e-10);
  CHECK(std::abs(grad.dh(0)) < 1e-10);
  const double best = gmrf::nll(scalar(total - h, h), e, a);
  CHECK(gmrf::nll(scalar(total * 1.1 - h, h), e, a) > best);
  CHECK(gmrf::nll(scalar(total / 1.1 - h, h), e, a) > best);
}

TEST_CASE("normalized negative log-likelihood is the Gaussian log density") {
  const auto edges = oracle::random_edges(6, 0.5, 3, true);
  const Graph g = Graph::from_edges(6, edges);
  const GmrfParams p = random_params(2, 3);
  const AttributeMatrix a{MatrixXd::Random(6, 2), {"x", "y"}};
  const MatrixXd G = dense_gamma(p, g, edges);
  const VectorXd v = vec(a.values);
  const double expect = 0.5 * v.dot(G * v) - 0.5 * std::log(G.determinant()) + 6.0 * std::log(2.0 * M_PI);
  CHECK(gmrf::negative_log_likelihood(p, g, a) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(gmrf::nll(p, g, a) == doctest::Approx(v.dot(G * v) - std::log(G.determinant())).epsilon(1e-12));
}

TEST_CASE("dense and spectral nll and gradient agree") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Graph g = Graph::from_edges(12, oracle::random_edges(12, 0.3, seed, true));
    const GmrfParams p = random_params(3, seed);
    const AttributeMatrix a{MatrixXd::Random(12, 3), {"a", "b", "c"}};
    const auto d = gmrf::nll_gradient(p, g, a, with_method(gmrf::SolveMethod::kDense));
    const auto s = gmrf::nll_gradient(p, g, a, with_method(gmrf::SolveMethod::kSpectral));
    CHECK(d.value == doctest::Approx(s.value).epsilon(1e-11));
    CHECK((d.dH - s.dH).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((d.dh - s.dh).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(gmrf::nll(p, g, a, with_method(gmrf::SolveMethod::kDense)) ==
          doctest::Approx(d.value).epsilon(1e-12));
  }
}

TEST_CASE("gradient matches central finite differences") {
  const Graph g = Graph::from_edges(8, oracle::random_edges(8, 0.4, 21, true));
  const GmrfParams p = random_params(3, 21);
  const AttributeMatrix a{MatrixXd::Random(8, 3), {"a", "b", "c"}};
  const auto opts = with_method(gmrf::SolveMethod::kDense);
  const auto grad = gmrf::nll_gradient(p, g, a, opts);
  CHECK((grad.dH - grad.dH.transpose()).norm() < 1e-13);
  const double step = 1e-5;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      MatrixXd Hp = p.H();
      MatrixXd Hm = p.H();
      Hp(i, j) += step;
      Hm(i, j) -= step;
      if (i != j) {
        Hp(j, i) += step;
        Hm(j, i) -= step;
      }
      const double fd = (gmrf::nll(GmrfParams(Hp, p.h()), g, a, opts) -
                         gmrf::nll(GmrfParams(Hm, p.h()), g, a, opts)) / (2 * step);
      CHECK(std::abs(fd - grad.dH(i, j)) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
    VectorXd hp = p.h();
    VectorXd hm = p.h();
    hp(i) += step;
    hm(i) -= step;
    const double fd = (gmrf::nll(GmrfParams(p.H(), hp), g, a, opts) -
                       gmrf::nll(GmrfParams(p.H(), hm), g, a, opts)) / (2 * step);
    CHECK(std::abs(fd - grad.dh(i)) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("stochastic nll agrees with the exact value within its standard error") {
  const auto edges = oracle::random_edges(150, 0.04, 5, true);
  const Graph g = Graph::from_edges(150, edges);
  const GmrfParams p = random_params(2, 5);
  const AttributeMatrix a = gmrf::sample(p, g, 5);
  gmrf::ModelOptions stoch = with_method(gmrf::SolveMethod::kStochastic);
  stoch.slq.num_probes = 64;
  stoch.slq.seed = 3;
  const double exact = gmrf::nll(p, g, a, with_method(gmrf::SolveMethod::kDense));
  const double est = gmrf::nll(p, g, a, stoch);
  const auto se = gmrf::slq_logdet_estimate(gmrf::precision_operator(p, g), stoch.slq).std_error;
  CHECK(std::abs(est - exact) <= 3.0 * se);

  // The stochastic gradient is close to the exact one.
  stoch.slq.num_probes = 256;
  const auto gs = gmrf::nll_gradient(p, g, a, stoch);
  const auto gd = gmrf::nll_gradient(p, g, a, with_method(gmrf::SolveMethod::kDense));
  CHECK((gs.dH - gd.dH).norm() < 0.1 * gd.dH.norm() + 5.0);
  CHECK((gs.dh - gd.dh).norm() < 0.1 * gd.dh.norm() + 5.0);
}

TEST_CASE("fit recovers the closed-form scalar optimum") {
  const Graph e = edgeless(200);
  const AttributeMatrix a = gmrf::sample(scalar(2.5, 1.0), e, 3);
  gmrf::FitConfig cfg;
  cfg.restarts = 3;
  cfg.steps = 300;
  cfg.learning_rate = 0.01;
  cfg.weight_decay = 0.0;
  cfg.seed = 1;
  const auto res = gmrf::fit(e, a, cfg);
  // Only H + h is identified on an edgeless graph.
  const double total = 200.0 / a.values.squaredNorm();
  CHECK(res.params.H()(0, 0) + res.params.h()(0) == doctest::Approx(total).epsilon(1e-3));
  CHECK(res.restart_nll.size() == 3);
  CHECK(res.nll == doctest::Approx(gmrf::nll(res.params, e, a)).epsilon(1e-12));
}

TEST_CASE("fit recovers the ordering of the smoothing strengths") {
  const Graph g = gmrf::watts_strogatz(300, 6, 0.1, 4);
  MatrixXd H(2, 2);
  H << 1.0, 0.3, 0.3, 1.0;
  VectorXd h(2);
  h << 10.0, 1.0;
  const AttributeMatrix a = AttributeMatrix::centered(gmrf::sample(GmrfParams(H, h), g, 8).values);
  gmrf::FitConfig cfg;
  cfg.restarts = 2;
  cfg.steps = 600;
  cfg.learning_rate = 0.02;
  cfg.seed = 2;
  cfg.model.method = gmrf::SolveMethod::kSpectral;
  const auto res = gmrf::fit(g, a, cfg);
  CHECK(res.params.h()(0) > res.params.h()(1));
  CHECK(res.params.h()(0) / res.params.h()(1) > 3.0);
}

TEST_CASE("plain gradient descent never increases the nll") {
  const Graph g = Graph::from_edges(20, oracle::random_edges(20, 0.2, 6, true));
  const AttributeMatrix a = AttributeMatrix::centered(gmrf::sample(random_params(3, 6), g, 6).values);
  gmrf::FitConfig cfg;
  cfg.restarts = 2;
  cfg.steps = 60;
  cfg.learning_rate = 0.05;
  cfg.plain_gradient_descent = true;
  cfg.trace_every = 1;
  cfg.model.method = gmrf::SolveMethod::kDense;
  const auto res = gmrf::fit(g, a, cfg);
  REQUIRE(res.trace.size() > 10);
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].nll <= res.trace[i - 1].nll + 1e-8);
  }
  CHECK(res.nll <= res.trace.back().nll + 1e-8);
}

TEST_CASE("fit is deterministic and picks the best restart") {
  const Graph g = path(15);
  const AttributeMatrix a = AttributeMatrix::centered(gmrf::sample(random_params(2, 1), g, 1).values);
  gmrf::FitConfig cfg;
  cfg.restarts = 4;
  cfg.steps = 40;
  cfg.learning_rate = 0.05;
  cfg.seed = 9;
  const auto r1 = gmrf::fit(g, a, cfg);
  const auto r2 = gmrf::fit(g, a, cfg);
  CHECK(r1.params.H() == r2.params.H());
  CHECK(r1.params.h() == r2.params.h());
  CHECK(r1.best_restart == r2.best_restart);
  for (double v : r1.restart_nll) CHECK(r1.nll <= v);
  CHECK(r1.nll == r1.restart_nll[static_cast<std::size_t>(r1.best_restart)]);

  cfg.restarts = 0;
  CHECK_THROWS_AS(gmrf::fit(g, a, cfg), std::invalid_argument);
}

TEST_CASE("synthetic parameters") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GmrfParams p = gmrf::synthetic_params(4, 10.0, seed);
    CHECK(p.H().rows() == 5);
    CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(p.H()).eigenvalues().minCoeff() > 0.0);
    for (int i = 0; i < 5; ++i) {
      CHECK(p.h()(i) >= 10.0 * std::pow(10.0, -0.5));
      CHECK(p.h()(i) < 10.0 * std::pow(10.0, 0.5));
    }
  }
  CHECK(gmrf::synthetic_params(4, 10.0, 3).H() == gmrf::synthetic_params(4, 10.0, 3).H());
  CHECK(gmrf::synthetic_params(0, 1.0, 3).H().rows() == 1);
}

TEST_CASE("parameter JSON round trip is value exact") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GmrfParams p = gmrf::synthetic_params(3, 7.3, seed);
    const GmrfParams q = gmrf::params_from_json(gmrf::params_to_json(p));
    CHECK(p.H() == q.H());
    CHECK(p.h() == q.h());
  }
  const auto dir = std::filesystem::temp_directory_path() / "gmrf_test_params";
  std::filesystem::create_directories(dir);
  const GmrfParams p = gmrf::synthetic_params(2, 1.0, 1);
  gmrf::save_params(p, (dir / "p.json").string());
  CHECK(gmrf::load_params((dir / "p.json").string()).H() == p.H());

  const auto nested = gmrf::params_from_json(R"({"p":1,"H":[[2,0.5],[0.5,1]],"h":[1,2]})");
  CHECK(nested.H()(0, 1) == 0.5);
  CHECK_THROWS_AS(gmrf::params_from_json("{"), gmrf::DataError);
  CHECK_THROWS_AS(gmrf::params_from_json(R"({"p":1,"H":[1,0,0],"h":[1,1]})"), gmrf::DataError);
  CHECK_THROWS_AS(gmrf::params_from_json(R"({"p":0,"H":[-1],"h":[1]})"), gmrf::DataError);
  CHECK_THROWS_AS(gmrf::load_params((dir / "missing.json").string()), gmrf::DataError);
}
