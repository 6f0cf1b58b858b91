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

#ifndef GMRF_GMRF_HPP_
#define GMRF_GMRF_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmrf/attributes.hpp"
#include "gmrf/graph.hpp"
#include "gmrf/linalg.hpp"

namespace gmrf {

// Model parameters: SPD H of size (p+1)x(p+1) and strictly positive h of
// length p+1. The precision of vec(A) is Gamma = H (x) I_n + diag(h) (x) N,
// with vec stacking columns (entry for node u, attribute i at i*n + u).
class GmrfParams {
 public:
  GmrfParams() = default;
  // Throws std::invalid_argument if H is not symmetric (1e-12), not positive
  // definite, or h has a nonpositive / non-finite entry.
  GmrfParams(Eigen::MatrixXd H, Eigen::VectorXd h);

  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::VectorXd& h() const { return h_; }
  // p + 1
  Eigen::Index num_attributes() const { return h_.size(); }

  // Smoothing level implied for column i: h_i / H_ii.
  double omega(Eigen::Index i) const { return h_(i) / H_(i, i); }

 private:
  Eigen::MatrixXd H_;
  Eigen::VectorXd h_;
};

// Eigendecomposition N = V diag(lambda) V^T. Under it, Gamma splits into n
// independent (p+1)x(p+1) blocks M_k = H + lambda_k diag(h).
struct LaplacianSpectrum {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd V;

  static LaplacianSpectrum compute(const Graph& g);
};

enum class SolveMethod { kAuto, kDense, kSpectral, kStochastic };

struct ModelOptions {
  SolveMethod method = SolveMethod::kAuto;
  // kAuto picks dense when n(p+1) <= dense_threshold, otherwise spectral
  // when n <= spectral_threshold, otherwise stochastic.
  Eigen::Index dense_threshold = 2000;
  Eigen::Index spectral_threshold = 4000;
  SlqConfig slq;
  CgConfig cg;
  // Optional precomputed spectrum of the same graph; computed on demand
  // otherwise.
  const LaplacianSpectrum* spectrum = nullptr;
};

SolveMethod resolve_method(const ModelOptions& opts, Eigen::Index n, Eigen::Index attrs);

// Gamma v for v of length n(p+1).
Eigen::VectorXd precision_apply(const GmrfParams& params, const Graph& g,
                                const Eigen::VectorXd& v);
// Same action on the n x (p+1) matrix form: V H + N V diag(h).
Eigen::MatrixXd precision_apply(const GmrfParams& params, const Graph& g,
                                const Eigen::MatrixXd& values);
template <typename Derived>
auto precision_apply(const GmrfParams& params, const Graph& g,
                     const Eigen::MatrixBase<Derived>& v) {
  if constexpr (Derived::ColsAtCompileTime == 1) {
    return precision_apply(params, g, Eigen::VectorXd(v));
  } else {
    return precision_apply(params, g, Eigen::MatrixXd(v));
  }
}

LinearOperator precision_operator(const GmrfParams& params, const Graph& g);

// Dense Gamma; small problems only.
Eigen::MatrixXd dense_precision(const GmrfParams& params, const Graph& g);

// phi = 1/2 sum_u a_u^T H a_u + 1/2 sum_i h_i A_i^T N A_i.
double log_potential(const GmrfParams& params, const Graph& g, const AttributeMatrix& a);
double log_potential(const GmrfParams& params, const Graph& g, const Eigen::MatrixXd& values);

// Draw vec(A) ~ N(0, Gamma^{-1}). Dense: Cholesky of Gamma. Spectral: A = V Z
// with the rows of Z drawn from N(0, M_k^{-1}). The stochastic method is not
// available for sampling.
AttributeMatrix sample(const GmrfParams& params, const Graph& g, std::uint64_t seed,
                       const ModelOptions& opts = {});

// Draws the columns not listed in observed_cols from their exact conditional
// distribution given the listed columns of `values`. Observed columns are
// copied through unchanged.
AttributeMatrix sample_conditional(const GmrfParams& params, const Graph& g,
                                   const AttributeMatrix& values,
                                   const std::vector<int>& observed_cols, std::uint64_t seed,
                                   const ModelOptions& opts = {});

// Conditional mean of the unobserved columns (n x (p+1), observed columns
// copied through).
Eigen::MatrixXd conditional_mean_columns(const GmrfParams& params, const Graph& g,
                                         const Eigen::MatrixXd& values,
                                         const std::vector<int>& observed_cols,
                                         const ModelOptions& opts = {});

// Omega = vec(A)^T Gamma vec(A) - log det Gamma. The constant n(p+1) log(2 pi)
// and the factor 1/2 are omitted on every path; see negative_log_likelihood
// for the normalized value.
double nll(const GmrfParams& params, const Graph& g, const AttributeMatrix& a,
           const ModelOptions& opts = {});

// -log p(A) = (Omega + n(p+1) log 2 pi) / 2. Dense and spectral paths only.
double negative_log_likelihood(const GmrfParams& params, const Graph& g,
                               const AttributeMatrix& a, const ModelOptions& opts = {});

struct NllGradient {
  double value = 0.0;  // Omega at the same point (SLQ estimate on the stochastic path)
  // dOmega/dH with H_ij and H_ji tied: off-diagonal entries hold the sum of
  // both partial derivatives. Symmetric.
  Eigen::MatrixXd dH;
  Eigen::VectorXd dh;
};

NllGradient nll_gradient(const GmrfParams& params, const Graph& g, const AttributeMatrix& a,
                         const ModelOptions& opts = {});

struct FitConfig {
  int restarts = 32;
  int steps = 3000;
  double learning_rate = 1e-3;
  double weight_decay = 2.5e-4;
  std::uint64_t seed = 0;
  // Plain gradient descent with backtracking instead of AdamW. Guarantees a
  // monotone NLL path.
  bool plain_gradient_descent = false;
  // Relative NLL change below which a restart stops early (0 disables).
  double stop_tolerance = 0.0;
  // Record NLL every trace_every steps of the best restart (0 disables).
  int trace_every = 0;
  // kAuto fits on the spectral path whenever n <= spectral_threshold: it is
  // exact and its eigendecomposition is shared by every step.
  ModelOptions model;
};

struct FitTracePoint {
  int restart = 0;
  int step = 0;
  double nll = 0.0;
};

struct FitResult {
  GmrfParams params;
  double nll = 0.0;
  int best_restart = 0;
  std::vector<double> restart_nll;  // final NLL per restart, NaN if diverged
  std::vector<FitTracePoint> trace;
};

// Maximum likelihood fit over an unconstrained parameterization: H = L L^T
// with L lower triangular (log of its diagonal optimized), h = exp(theta).
// Restarts draw independent initial points; the lowest NLL wins, ties to the
// lower restart index. Throws NumericError if every restart diverges.
FitResult fit(const Graph& g, const AttributeMatrix& a, const FitConfig& cfg);

// F_ij = z_i^T z_j for p+1 standard normal vectors of length p+1,
// H = (F + 0.01 I)^{-1}, h_i = h0 * 10^{b_i} with b_i ~ U[-0.5, 0.5).
GmrfParams synthetic_params(int p, double h0, std::uint64_t seed);

// JSON {"p": int, "H": row-major flat array, "h": array}. Doubles are
// written in shortest round-trip form, so reading back is value-exact.
std::string params_to_json(const GmrfParams& params);
GmrfParams params_from_json(const std::string& text);
void save_params(const GmrfParams& params, const std::string& path);
GmrfParams load_params(const std::string& path);

}  // namespace gmrf

#endif  // GMRF_GMRF_HPP_
