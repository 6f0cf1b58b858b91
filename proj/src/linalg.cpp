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

#include "gmrf/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gmrf/error.hpp"
#include "gmrf/parallel.hpp"
#include "gmrf/random.hpp"

namespace gmrf {

LinearOperator LinearOperator::from_dense(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("LinearOperator: matrix not square");
  const Eigen::Index dim = m.rows();
  return {dim, [m = std::move(m)](const Eigen::VectorXd& v) -> Eigen::VectorXd { return m * v; }};
}

CgResult conjugate_gradient_run(const LinearOperator& op, const Eigen::VectorXd& b,
                                const CgConfig& cfg, const Eigen::VectorXd* x0) {
  if (b.size() != op.dim) throw std::invalid_argument("conjugate_gradient: length mismatch");
  if (!(cfg.rel_tolerance > 0.0)) throw std::invalid_argument("CgConfig: tolerance must be > 0");
  const int max_it = cfg.max_iterations > 0 ? cfg.max_iterations
                                            : static_cast<int>(10 * std::max<Eigen::Index>(1, op.dim));
  CgResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x = Eigen::VectorXd::Zero(op.dim);
    res.converged = true;
    return res;
  }
  Eigen::VectorXd x;
  Eigen::VectorXd r;
  if (x0) {
    if (x0->size() != op.dim) throw std::invalid_argument("conjugate_gradient: bad start vector");
    x = *x0;
    r = b - op.apply(x);
  } else {
    x = Eigen::VectorXd::Zero(op.dim);
    r = b;
  }
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const double target = cfg.rel_tolerance * bnorm;
  int it = 0;
  while (std::sqrt(rr) > target && it < max_it) {
    const Eigen::VectorXd q = op.apply(p);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) throw NumericError("conjugate_gradient: operator is not positive definite");
    const double step = rr / pq;
    x.noalias() += step * p;
    r.noalias() -= step * q;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
    ++it;
    // Refresh the residual occasionally to limit drift of the recurrence, and
    // restart the search direction so the refreshed residual stays consistent.
    if (it % 50 == 0) {
      r = b - op.apply(x);
      rr = r.squaredNorm();
      p = r;
    }
  }
  // Report the true residual, not the recursively updated one.
  const double true_res = (b - op.apply(x)).norm() / bnorm;
  res.x = std::move(x);
  res.iterations = it;
  res.rel_residual = true_res;
  res.converged = std::sqrt(rr) <= target;
  return res;
}

Eigen::VectorXd conjugate_gradient(const LinearOperator& op, const Eigen::VectorXd& b,
                                   const CgConfig& cfg) {
  CgResult res = conjugate_gradient_run(op, b, cfg);
  if (!res.converged) {
    throw ConvergenceError("conjugate_gradient: no convergence after " +
                               std::to_string(res.iterations) + " iterations (relative residual " +
                               std::to_string(res.rel_residual) + ")",
                           res.rel_residual, res.iterations);
  }
  return std::move(res.x);
}

Tridiagonal lanczos(const LinearOperator& op, const Eigen::VectorXd& v0, int steps) {
  if (v0.size() != op.dim) throw std::invalid_argument("lanczos: length mismatch");
  if (steps < 1) throw std::invalid_argument("lanczos: steps must be >= 1");
  const double n0 = v0.norm();
  if (n0 == 0.0) throw std::invalid_argument("lanczos: zero start vector");
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXd v = v0 / n0;
  Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(op.dim);
  double b_prev = 0.0;
  const int k_max = static_cast<int>(std::min<Eigen::Index>(steps, op.dim));
  for (int j = 0; j < k_max; ++j) {
    Eigen::VectorXd w = op.apply(v);
    const double a = w.dot(v);
    alpha.push_back(a);
    if (j + 1 == k_max) break;
    w.noalias() -= a * v;
    w.noalias() -= b_prev * v_prev;
    const double b = w.norm();
    if (b <= 1e-12 * std::max(1.0, std::abs(a))) break;
    beta.push_back(b);
    v_prev = std::move(v);
    v = w / b;
    b_prev = b;
  }
  Tridiagonal t;
  t.alpha = Eigen::Map<Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
  t.beta = Eigen::Map<Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  return t;
}

namespace {

void check_slq_config(const SlqConfig& cfg) {
  if (cfg.num_probes < 1) throw std::invalid_argument("SlqConfig: num_probes must be >= 1");
  if (cfg.lanczos_steps < 1) throw std::invalid_argument("SlqConfig: lanczos_steps must be >= 1");
}

StochasticEstimate summarize(const std::vector<double>& samples) {
  const double k = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double s : samples) sum += s;
  const double mean = sum / k;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  StochasticEstimate e;
  e.mean = mean;
  e.std_error = samples.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
  return e;
}

// Gauss quadrature of e1^T log(T) e1 from the eigenpairs of T.
double quadrature_log(const Tridiagonal& t) {
  const Eigen::Index k = t.alpha.size();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  T.diagonal() = t.alpha;
  for (Eigen::Index i = 0; i + 1 < k; ++i) T(i, i + 1) = T(i + 1, i) = t.beta(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double theta = es.eigenvalues()(i);
    if (!(theta > 0.0)) throw NumericError("slq_logdet: nonpositive Ritz value; operator not SPD");
    const double w = es.eigenvectors()(0, i);
    acc += w * w * std::log(theta);
  }
  return acc;
}

}  // namespace

void check_operator_symmetry(const LinearOperator& op, std::uint64_t seed, double rel_tol) {
  Rng rng(derive_seed(seed, streams::kProbe, ~0ULL));
  const Eigen::VectorXd u = standard_normal_vector(op.dim, rng);
  const Eigen::VectorXd v = standard_normal_vector(op.dim, rng);
  const Eigen::VectorXd mu = op.apply(u);
  const Eigen::VectorXd mv = op.apply(v);
  const double a = u.dot(mv);
  const double b = mu.dot(v);
  const double scale = std::max({std::abs(a), std::abs(b), mu.norm() * v.norm(), 1e-300});
  if (std::abs(a - b) > rel_tol * scale) {
    throw std::invalid_argument("operator failed the symmetry check");
  }
}

StochasticEstimate slq_logdet_estimate(const LinearOperator& op, const SlqConfig& cfg) {
  check_slq_config(cfg);
  if (cfg.check_symmetry) check_operator_symmetry(op, cfg.seed);
  std::vector<double> samples(static_cast<std::size_t>(cfg.num_probes));
  const double n = static_cast<double>(op.dim);
  parallel_for(samples.size(), [&](std::size_t i) {
    Rng rng(derive_seed(cfg.seed, streams::kProbe, i));
    const Eigen::VectorXd z = rademacher_vector(op.dim, rng);
    samples[i] = n * quadrature_log(lanczos(op, z, cfg.lanczos_steps));
  });
  return summarize(samples);
}

double slq_logdet(const LinearOperator& op, const SlqConfig& cfg) {
  return slq_logdet_estimate(op, cfg).mean;
}

StochasticEstimate hutchinson_trace_estimate(const LinearOperator& op, const SlqConfig& cfg) {
  check_slq_config(cfg);
  if (cfg.check_symmetry) check_operator_symmetry(op, cfg.seed);
  std::vector<double> samples(static_cast<std::size_t>(cfg.num_probes));
  parallel_for(samples.size(), [&](std::size_t i) {
    Rng rng(derive_seed(cfg.seed, streams::kProbe, i));
    const Eigen::VectorXd z = rademacher_vector(op.dim, rng);
    samples[i] = z.dot(op.apply(z));
  });
  return summarize(samples);
}

double hutchinson_trace(const LinearOperator& op, const SlqConfig& cfg) {
  return hutchinson_trace_estimate(op, cfg).mean;
}

double dense_logdet_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericError("Cholesky failed: matrix is not SPD");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const NodeIndexSet& rows,
                          const NodeIndexSet& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  }
  return out;
}

ConditionalGaussian dense_conditional_gaussian(const Eigen::VectorXd& mean,
                                               const Eigen::MatrixXd& precision,
                                               const NodeIndexSet& observed,
                                               const Eigen::VectorXd& observed_vals) {
  const Eigen::Index m = mean.size();
  if (precision.rows() != m || precision.cols() != m) {
    throw std::invalid_argument("dense_conditional_gaussian: precision has wrong shape");
  }
  if (observed.universe() != m) {
    throw std::invalid_argument("dense_conditional_gaussian: index set has wrong universe");
  }
  if (observed_vals.size() != static_cast<Eigen::Index>(observed.size())) {
    throw std::invalid_argument("dense_conditional_gaussian: observed values length mismatch");
  }
  ConditionalGaussian out;
  out.free = observed.complement();
  if (out.free.empty()) {
    out.mean.resize(0);
    out.cov.resize(0, 0);
    return out;
  }
  const Eigen::MatrixXd G_pp = submatrix(precision, out.free, out.free);
  const Eigen::MatrixXd G_pq = submatrix(precision, out.free, observed);
  Eigen::LLT<Eigen::MatrixXd> llt(G_pp);
  if (llt.info() != Eigen::Success) {
    throw NumericError("dense_conditional_gaussian: Gamma_PP is singular or not SPD");
  }
  const Eigen::VectorXd delta = observed_vals - observed.gather(mean);
  out.mean = out.free.gather(mean) - llt.solve(G_pq * delta);
  out.cov = llt.solve(Eigen::MatrixXd::Identity(G_pp.rows(), G_pp.cols()));
  out.cov = (0.5 * (out.cov + out.cov.transpose())).eval();
  return out;
}

}  // namespace gmrf
