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

#ifndef GMRF_LINALG_HPP_
#define GMRF_LINALG_HPP_

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "gmrf/graph.hpp"

namespace gmrf {

// A symmetric linear map supplied as a callback.
struct LinearOperator {
  Eigen::Index dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;

  static LinearOperator from_dense(Eigen::MatrixXd m);
};

struct CgConfig {
  double rel_tolerance = 1e-10;
  // 0 means 10 * dim.
  int max_iterations = 0;
};

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Plain (unpreconditioned) CG. Never throws on non-convergence; inspect
// `converged`.
CgResult conjugate_gradient_run(const LinearOperator& op, const Eigen::VectorXd& b,
                                const CgConfig& cfg = {}, const Eigen::VectorXd* x0 = nullptr);

// As above but throws ConvergenceError when the budget runs out.
Eigen::VectorXd conjugate_gradient(const LinearOperator& op, const Eigen::VectorXd& b,
                                   const CgConfig& cfg = {});

struct SlqConfig {
  int num_probes = 32;
  int lanczos_steps = 40;
  std::uint64_t seed = 0;
#ifdef NDEBUG
  bool check_symmetry = false;
#else
  bool check_symmetry = true;
#endif
};

struct Tridiagonal {
  Eigen::VectorXd alpha;  // diagonal, length k
  Eigen::VectorXd beta;   // off-diagonal, length k-1
};

// k-step Lanczos from start vector v0 (normalized internally), without
// reorthogonalization. Stops early when a beta falls below 1e-12 (scaled by
// max(1, |alpha|)), returning the shorter tridiagonal.
Tridiagonal lanczos(const LinearOperator& op, const Eigen::VectorXd& v0, int steps);

struct StochasticEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Rademacher probes; per-probe seeds are derived from cfg.seed and the probe
// index, so the result does not depend on thread scheduling.
StochasticEstimate slq_logdet_estimate(const LinearOperator& op, const SlqConfig& cfg);
double slq_logdet(const LinearOperator& op, const SlqConfig& cfg);

StochasticEstimate hutchinson_trace_estimate(const LinearOperator& op, const SlqConfig& cfg);
double hutchinson_trace(const LinearOperator& op, const SlqConfig& cfg);

// Throws std::invalid_argument if <u, Mv> and <Mu, v> differ by more than
// rel_tol on a pair of seeded random vectors.
void check_operator_symmetry(const LinearOperator& op, std::uint64_t seed, double rel_tol = 1e-8);

// log det of a dense SPD matrix via Cholesky. Throws NumericError if not SPD.
double dense_logdet_spd(const Eigen::MatrixXd& m);

struct ConditionalGaussian {
  NodeIndexSet free;      // P, the unobserved indices
  Eigen::VectorXd mean;   // over P
  Eigen::MatrixXd cov;    // Gamma_PP^{-1}
};

// Conditions N(mean, precision^{-1}) on z_Q = observed_vals, with Q the
// observed set:
//   mean_P - Gamma_PP^{-1} Gamma_PQ (z_Q - mean_Q),   cov = Gamma_PP^{-1}.
ConditionalGaussian dense_conditional_gaussian(const Eigen::VectorXd& mean,
                                               const Eigen::MatrixXd& precision,
                                               const NodeIndexSet& observed,
                                               const Eigen::VectorXd& observed_vals);

// Submatrix m(rows, cols) for two index sets.
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const NodeIndexSet& rows,
                          const NodeIndexSet& cols);

}  // namespace gmrf

#endif  // GMRF_LINALG_HPP_
