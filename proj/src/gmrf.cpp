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

#include "gmrf/gmrf.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gmrf/error.hpp"
#include "gmrf/parallel.hpp"
#include "gmrf/random.hpp"
#include "model_kernel.hpp"

namespace gmrf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

GmrfParams::GmrfParams(MatrixXd H, VectorXd h) : H_(std::move(H)), h_(std::move(h)) {
  if (H_.rows() != H_.cols() || H_.rows() != h_.size() || h_.size() == 0) {
    throw std::invalid_argument("GmrfParams: H must be square and match the length of h");
  }
  if (!H_.allFinite()) throw std::invalid_argument("GmrfParams: H has non-finite entries");
  const double scale = std::max(1.0, H_.cwiseAbs().maxCoeff());
  if ((H_ - H_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("GmrfParams: H is not symmetric");
  }
  H_ = (0.5 * (H_ + H_.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(H_, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument("GmrfParams: H is not positive definite");
  }
  for (Index i = 0; i < h_.size(); ++i) {
    if (!(std::isfinite(h_(i)) && h_(i) > 0.0)) {
      throw std::invalid_argument("GmrfParams: h entries must be finite and positive");
    }
  }
}

LaplacianSpectrum LaplacianSpectrum::compute(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(dense_normalized_laplacian(g));
  if (es.info() != Eigen::Success) throw NumericError("Laplacian eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

SolveMethod resolve_method(const ModelOptions& opts, Index n, Index attrs) {
  if (opts.method != SolveMethod::kAuto) return opts.method;
  if (n * attrs <= opts.dense_threshold) return SolveMethod::kDense;
  if (n <= opts.spectral_threshold) return SolveMethod::kSpectral;
  return SolveMethod::kStochastic;
}

namespace {

void check_shape(const GmrfParams& params, const Graph& g, Index rows, Index cols) {
  if (rows != g.num_nodes() || cols != params.num_attributes()) {
    throw std::invalid_argument("attribute matrix is " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", expected " +
                                std::to_string(g.num_nodes()) + "x" +
                                std::to_string(params.num_attributes()));
  }
}

const LaplacianSpectrum& spectrum_for(const Graph& g, const ModelOptions& opts,
                                      LaplacianSpectrum& storage) {
  if (opts.spectrum) {
    if (opts.spectrum->lambda.size() != g.num_nodes()) {
      throw std::invalid_argument("supplied spectrum does not match the graph");
    }
    return *opts.spectrum;
  }
  storage = LaplacianSpectrum::compute(g);
  return storage;
}

Eigen::LLT<MatrixXd> cholesky_or_throw(const MatrixXd& m, const char* what) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericError(std::string(what) + ": not SPD");
  return llt;
}

// Column index sets for conditional sampling.
void split_columns(Index attrs, const std::vector<int>& observed, std::vector<int>& obs,
                   std::vector<int>& free) {
  std::vector<bool> mark(static_cast<std::size_t>(attrs), false);
  for (int c : observed) {
    if (c < 0 || c >= attrs) throw std::invalid_argument("observed column out of range");
    if (mark[c]) throw std::invalid_argument("observed column listed twice");
    mark[c] = true;
  }
  obs.clear();
  free.clear();
  for (int c = 0; c < attrs; ++c) (mark[c] ? obs : free).push_back(c);
}

MatrixXd select(const MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  }
  return out;
}

}  // namespace

MatrixXd precision_apply(const GmrfParams& params, const Graph& g, const MatrixXd& values) {
  check_shape(params, g, values.rows(), values.cols());
  return values * params.H() + apply_normalized_laplacian(g, values) * params.h().asDiagonal();
}

VectorXd precision_apply(const GmrfParams& params, const Graph& g, const VectorXd& v) {
  const Index n = g.num_nodes();
  const Index k = params.num_attributes();
  if (v.size() != n * k) {
    throw std::invalid_argument("precision_apply: expected length " + std::to_string(n * k));
  }
  const MatrixXd out = precision_apply(params, g, MatrixXd(Eigen::Map<const MatrixXd>(v.data(), n, k)));
  return Eigen::Map<const VectorXd>(out.data(), n * k);
}

LinearOperator precision_operator(const GmrfParams& params, const Graph& g) {
  const Index m = g.num_nodes() * params.num_attributes();
  return {m, [&params, &g](const VectorXd& v) -> VectorXd { return precision_apply(params, g, v); }};
}

MatrixXd dense_precision(const GmrfParams& params, const Graph& g) {
  const Index n = g.num_nodes();
  const Index k = params.num_attributes();
  const MatrixXd N = dense_normalized_laplacian(g);
  MatrixXd G = MatrixXd::Zero(n * k, n * k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      G.block(i * n, j * n, n, n).diagonal().setConstant(params.H()(i, j));
    }
    G.block(i * n, i * n, n, n) += params.h()(i) * N;
  }
  return G;
}

double log_potential(const GmrfParams& params, const Graph& g, const MatrixXd& values) {
  check_shape(params, g, values.rows(), values.cols());
  const MatrixXd NA = apply_normalized_laplacian(g, values);
  double phi = 0.0;
  for (Index u = 0; u < values.rows(); ++u) {
    phi += values.row(u) * params.H() * values.row(u).transpose();
  }
  for (Index i = 0; i < values.cols(); ++i) phi += params.h()(i) * values.col(i).dot(NA.col(i));
  return 0.5 * phi;
}

double log_potential(const GmrfParams& params, const Graph& g, const AttributeMatrix& a) {
  return log_potential(params, g, a.values);
}

namespace {

std::vector<std::string> default_names(Index k) {
  std::vector<std::string> names;
  for (Index j = 0; j < k; ++j) names.push_back("a" + std::to_string(j));
  return names;
}

}  // namespace

AttributeMatrix sample(const GmrfParams& params, const Graph& g, std::uint64_t seed,
                       const ModelOptions& opts) {
  const Index n = g.num_nodes();
  const Index k = params.num_attributes();
  Rng rng(derive_seed(seed, streams::kSample));
  const SolveMethod method = resolve_method(opts, n, k);
  AttributeMatrix out;
  out.names = default_names(k);
  if (method == SolveMethod::kDense) {
    const auto llt = cholesky_or_throw(dense_precision(params, g), "sample");
    const VectorXd z = standard_normal_vector(n * k, rng);
    const VectorXd x = llt.matrixU().solve(z);
    out.values = Eigen::Map<const MatrixXd>(x.data(), n, k);
    return out;
  }
  if (method != SolveMethod::kSpectral) {
    throw std::invalid_argument("sample: only dense and spectral methods can sample");
  }
  LaplacianSpectrum storage;
  const LaplacianSpectrum& spec = spectrum_for(g, opts, storage);
  MatrixXd Z(n, k);
  for (Index r = 0; r < n; ++r) {
    const MatrixXd M = params.H() + MatrixXd(spec.lambda(r) * params.h().asDiagonal());
    const auto llt = cholesky_or_throw(M, "sample");
    const VectorXd eps = standard_normal_vector(k, rng);
    Z.row(r) = llt.matrixU().solve(eps).transpose();
  }
  out.values = spec.V * Z;
  return out;
}

MatrixXd conditional_mean_columns(const GmrfParams& params, const Graph& g, const MatrixXd& values,
                                  const std::vector<int>& observed_cols, const ModelOptions& opts) {
  check_shape(params, g, values.rows(), values.cols());
  const Index n = g.num_nodes();
  const Index k = params.num_attributes();
  std::vector<int> obs;
  std::vector<int> free;
  split_columns(k, observed_cols, obs, free);
  MatrixXd out = values;
  if (free.empty()) return out;
  for (int c : free) out.col(c).setZero();
  if (obs.empty()) return out;
  const SolveMethod method = resolve_method(opts, n, k);
  if (method == SolveMethod::kDense) {
    std::vector<int> q;
    for (int c : obs) {
      for (Index u = 0; u < n; ++u) q.push_back(static_cast<int>(c * n + u));
    }
    const NodeIndexSet observed(q, static_cast<int>(n * k));
    VectorXd zq(static_cast<Index>(q.size()));
    for (std::size_t t = 0; t < obs.size(); ++t) zq.segment(t * n, n) = values.col(obs[t]);
    const auto cond = dense_conditional_gaussian(VectorXd::Zero(n * k), dense_precision(params, g),
                                                 observed, zq);
    for (std::size_t t = 0; t < free.size(); ++t) out.col(free[t]) = cond.mean.segment(t * n, n);
    return out;
  }
  if (method != SolveMethod::kSpectral) {
    throw std::invalid_argument("conditional_mean_columns: only dense and spectral methods");
  }
  LaplacianSpectrum storage;
  const LaplacianSpectrum& spec = spectrum_for(g, opts, storage);
  std::vector<int> all_rows(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) all_rows[i] = static_cast<int>(i);
  const MatrixXd H_pp = select(params.H(), free, free);
  const MatrixXd H_qp = select(params.H(), obs, free);
  MatrixXd A_q(n, static_cast<Index>(obs.size()));
  for (std::size_t t = 0; t < obs.size(); ++t) A_q.col(t) = values.col(obs[t]);
  const MatrixXd Bt = spec.V.transpose() * (A_q * H_qp);
  VectorXd h_p(static_cast<Index>(free.size()));
  for (std::size_t t = 0; t < free.size(); ++t) h_p(t) = params.h()(free[t]);
  MatrixXd Xt(n, static_cast<Index>(free.size()));
  for (Index r = 0; r < n; ++r) {
    const MatrixXd M = H_pp + MatrixXd(spec.lambda(r) * h_p.asDiagonal());
    Xt.row(r) = cholesky_or_throw(M, "conditional mean").solve(Bt.row(r).transpose()).transpose();
  }
  const MatrixXd mean = -spec.V * Xt;
  for (std::size_t t = 0; t < free.size(); ++t) out.col(free[t]) = mean.col(t);
  return out;
}

AttributeMatrix sample_conditional(const GmrfParams& params, const Graph& g,
                                   const AttributeMatrix& values,
                                   const std::vector<int>& observed_cols, std::uint64_t seed,
                                   const ModelOptions& opts) {
  check_shape(params, g, values.values.rows(), values.values.cols());
  const Index n = g.num_nodes();
  const Index k = params.num_attributes();
  std::vector<int> obs;
  std::vector<int> free;
  split_columns(k, observed_cols, obs, free);
  if (free.empty()) return values;
  if (obs.empty()) {
    AttributeMatrix s = sample(params, g, seed, opts);
    s.names = values.names;
    return s;
  }
  Rng rng(derive_seed(seed, streams::kSample, 1));
  AttributeMatrix out = values;
  out.values = conditional_mean_columns(params, g, values.values, observed_cols, opts);
  const SolveMethod method = resolve_method(opts, n, k);
  const Index fp = static_cast<Index>(free.size());
  if (method == SolveMethod::kDense) {
    std::vector<int> p;
    for (int c : free) {
      for (Index u = 0; u < n; ++u) p.push_back(static_cast<int>(c * n + u));
    }
    const NodeIndexSet pset(p, static_cast<int>(n * k));
    const MatrixXd G_pp = submatrix(dense_precision(params, g), pset, pset);
    const auto llt = cholesky_or_throw(G_pp, "sample_conditional");
    const VectorXd x = llt.matrixU().solve(standard_normal_vector(n * fp, rng));
    for (Index t = 0; t < fp; ++t) out.values.col(free[t]) += x.segment(t * n, n);
    return out;
  }
  LaplacianSpectrum storage;
  const LaplacianSpectrum& spec = spectrum_for(g, opts, storage);
  const MatrixXd H_pp = select(params.H(), free, free);
  VectorXd h_p(fp);
  for (Index t = 0; t < fp; ++t) h_p(t) = params.h()(free[t]);
  MatrixXd Z(n, fp);
  for (Index r = 0; r < n; ++r) {
    const MatrixXd M = H_pp + MatrixXd(spec.lambda(r) * h_p.asDiagonal());
    const auto llt = cholesky_or_throw(M, "sample_conditional");
    Z.row(r) = llt.matrixU().solve(standard_normal_vector(fp, rng)).transpose();
  }
  const MatrixXd noise = spec.V * Z;
  for (Index t = 0; t < fp; ++t) out.values.col(free[t]) += noise.col(t);
  return out;
}

namespace detail {

DataStats DataStats::compute(const Graph& g, const MatrixXd& values) {
  DataStats s;
  s.n = values.rows();
  s.C = values.transpose() * values;
  const MatrixXd NA = apply_normalized_laplacian(g, values);
  s.q.resize(values.cols());
  for (Index i = 0; i < values.cols(); ++i) s.q(i) = values.col(i).dot(NA.col(i));
  return s;
}

double DataStats::quadratic(const MatrixXd& H, const VectorXd& h) const {
  return (H.array() * C.array()).sum() + h.dot(q);
}

LogdetEvaluator::LogdetEvaluator(const Graph& g, Index attrs, const ModelOptions& opts)
    : g_(g), attrs_(attrs), opts_(opts), method_(resolve_method(opts, g.num_nodes(), attrs)) {
  if (method_ == SolveMethod::kSpectral) {
    spectrum_ = &spectrum_for(g, opts, owned_spectrum_);
  } else if (method_ == SolveMethod::kDense) {
    dense_N_ = dense_normalized_laplacian(g);
  }
}

LogdetTerms LogdetEvaluator::evaluate(const MatrixXd& H, const VectorXd& h, bool with_traces,
                                      bool with_logdet) const {
  const Index n = g_.num_nodes();
  const Index k = attrs_;
  LogdetTerms out;
  if (method_ == SolveMethod::kSpectral) {
    out.T = MatrixXd::Zero(k, k);
    out.t = VectorXd::Zero(k);
    const MatrixXd I = MatrixXd::Identity(k, k);
    for (Index r = 0; r < n; ++r) {
      const double lam = spectrum_->lambda(r);
      const MatrixXd M = H + MatrixXd(lam * h.asDiagonal());
      const auto llt = cholesky_or_throw(M, "log-determinant block");
      out.logdet += 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
      if (with_traces) {
        const MatrixXd Minv = llt.solve(I);
        out.T += Minv;
        out.t += lam * Minv.diagonal();
      }
    }
    return out;
  }
  if (method_ == SolveMethod::kDense) {
    MatrixXd G = MatrixXd::Zero(n * k, n * k);
    for (Index i = 0; i < k; ++i) {
      for (Index j = 0; j < k; ++j) G.block(i * n, j * n, n, n).diagonal().setConstant(H(i, j));
      G.block(i * n, i * n, n, n) += h(i) * dense_N_;
    }
    const auto llt = cholesky_or_throw(G, "precision");
    out.logdet = 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    if (with_traces) {
      const MatrixXd S = llt.solve(MatrixXd::Identity(n * k, n * k));
      out.T.resize(k, k);
      out.t.resize(k);
      for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) out.T(i, j) = S.block(j * n, i * n, n, n).trace();
        out.t(i) = (S.block(i * n, i * n, n, n).array() * dense_N_.array()).sum();
      }
    }
    return out;
  }
  // Stochastic: SLQ for log det, Hutchinson with CG solves for the traces.
  const GmrfParams params(H, h);
  const LinearOperator op = precision_operator(params, g_);
  if (with_logdet) out.logdet = slq_logdet(op, opts_.slq);
  if (with_traces) {
    const int probes = opts_.slq.num_probes;
    if (probes < 1) throw std::invalid_argument("SlqConfig: num_probes must be >= 1");
    std::vector<MatrixXd> Ts(static_cast<std::size_t>(probes));
    std::vector<VectorXd> ts(static_cast<std::size_t>(probes));
    parallel_for(static_cast<std::size_t>(probes), [&](std::size_t s) {
      Rng rng(derive_seed(opts_.slq.seed, streams::kProbe, 1000003 + s));
      const VectorXd z = rademacher_vector(n * k, rng);
      const VectorXd x = conjugate_gradient(op, z, opts_.cg);
      const Eigen::Map<const MatrixXd> X(x.data(), n, k);
      const Eigen::Map<const MatrixXd> Z(z.data(), n, k);
      Ts[s] = X.transpose() * Z;
      const MatrixXd NZ = apply_normalized_laplacian(g_, MatrixXd(Z));
      ts[s].resize(k);
      for (Index i = 0; i < k; ++i) ts[s](i) = X.col(i).dot(NZ.col(i));
    });
    out.T = MatrixXd::Zero(k, k);
    out.t = VectorXd::Zero(k);
    for (int s = 0; s < probes; ++s) {
      out.T += Ts[s];
      out.t += ts[s];
    }
    out.T /= probes;
    out.t /= probes;
    out.T = (0.5 * (out.T + out.T.transpose())).eval();
  }
  return out;
}

NllGradient assemble_gradient(const DataStats& stats, const MatrixXd& H, const VectorXd& h,
                              const LogdetTerms& terms) {
  NllGradient g;
  g.value = stats.quadratic(H, h) - terms.logdet;
  const MatrixXd G = stats.C - terms.T;
  g.dH = 2.0 * G;
  g.dH.diagonal() = G.diagonal();
  g.dh = stats.q - terms.t;
  return g;
}

}  // namespace detail

double nll(const GmrfParams& params, const Graph& g, const AttributeMatrix& a,
           const ModelOptions& opts) {
  check_shape(params, g, a.values.rows(), a.values.cols());
  const auto stats = detail::DataStats::compute(g, a.values);
  const detail::LogdetEvaluator eval(g, params.num_attributes(), opts);
  return stats.quadratic(params.H(), params.h()) -
         eval.evaluate(params.H(), params.h(), false).logdet;
}

double negative_log_likelihood(const GmrfParams& params, const Graph& g, const AttributeMatrix& a,
                               const ModelOptions& opts) {
  if (resolve_method(opts, g.num_nodes(), params.num_attributes()) == SolveMethod::kStochastic) {
    throw std::invalid_argument("negative_log_likelihood: exact paths only");
  }
  const double m = static_cast<double>(g.num_nodes() * params.num_attributes());
  return 0.5 * (nll(params, g, a, opts) + m * std::log(2.0 * std::numbers::pi));
}

NllGradient nll_gradient(const GmrfParams& params, const Graph& g, const AttributeMatrix& a,
                         const ModelOptions& opts) {
  check_shape(params, g, a.values.rows(), a.values.cols());
  const auto stats = detail::DataStats::compute(g, a.values);
  const detail::LogdetEvaluator eval(g, params.num_attributes(), opts);
  return detail::assemble_gradient(stats, params.H(), params.h(),
                                   eval.evaluate(params.H(), params.h(), true));
}

GmrfParams synthetic_params(int p, double h0, std::uint64_t seed) {
  if (p < 0) throw std::invalid_argument("synthetic_params: p must be >= 0");
  if (!(h0 > 0.0) || !std::isfinite(h0)) throw std::invalid_argument("synthetic_params: h0 must be > 0");
  const Index k = p + 1;
  Rng rng(derive_seed(seed, streams::kParams));
  MatrixXd Z(k, k);
  for (Index i = 0; i < k; ++i) Z.col(i) = standard_normal_vector(k, rng);
  const MatrixXd F = Z.transpose() * Z;
  MatrixXd H = (F + 0.01 * MatrixXd::Identity(k, k)).llt().solve(MatrixXd::Identity(k, k));
  H = (0.5 * (H + H.transpose())).eval();
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  VectorXd h(k);
  for (Index i = 0; i < k; ++i) h(i) = h0 * std::pow(10.0, unif(rng));
  return GmrfParams(std::move(H), std::move(h));
}

std::string params_to_json(const GmrfParams& params) {
  const Index k = params.num_attributes();
  nlohmann::ordered_json j;
  j["p"] = k - 1;
  std::vector<double> H;
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) H.push_back(params.H()(r, c));
  }
  j["H"] = H;
  j["h"] = std::vector<double>(params.h().data(), params.h().data() + k);
  return j.dump(2) + "\n";
}

GmrfParams params_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("params JSON: ") + e.what());
  }
  try {
    const Index k = j.at("p").get<Index>() + 1;
    if (k < 1) throw DataError("params JSON: p must be >= 0");
    std::vector<double> flat;
    for (const auto& e : j.at("H")) {
      if (e.is_array()) {
        for (const auto& x : e) flat.push_back(x.get<double>());
      } else {
        flat.push_back(e.get<double>());
      }
    }
    const auto hv = j.at("h").get<std::vector<double>>();
    if (static_cast<Index>(flat.size()) != k * k || static_cast<Index>(hv.size()) != k) {
      throw DataError("params JSON: H must have (p+1)^2 entries and h p+1 entries");
    }
    MatrixXd H(k, k);
    for (Index r = 0; r < k; ++r) {
      for (Index c = 0; c < k; ++c) H(r, c) = flat[r * k + c];
    }
    VectorXd h = Eigen::Map<const VectorXd>(hv.data(), k);
    try {
      return GmrfParams(std::move(H), std::move(h));
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("params JSON: ") + e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("params JSON: ") + e.what());
  }
}

void save_params(const GmrfParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write params: " + path);
  out << params_to_json(params);
}

GmrfParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open params: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return params_from_json(ss.str());
}

}  // namespace gmrf
