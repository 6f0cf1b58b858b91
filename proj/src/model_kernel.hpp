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

#ifndef GMRF_DETAIL_MODEL_KERNEL_HPP_
#define GMRF_DETAIL_MODEL_KERNEL_HPP_

// Internal helpers shared by the likelihood and fitting code. Not installed.

#include <Eigen/Dense>

#include "gmrf/gmrf.hpp"

namespace gmrf::detail {

// Data-dependent pieces of Omega that do not change with the parameters:
// C = A^T A and q_i = A_i^T N A_i. Then vec(A)^T Gamma vec(A) = tr(H C) + h.q.
struct DataStats {
  Eigen::MatrixXd C;
  Eigen::VectorXd q;
  Eigen::Index n = 0;

  static DataStats compute(const Graph& g, const Eigen::MatrixXd& values);
  double quadratic(const Eigen::MatrixXd& H, const Eigen::VectorXd& h) const;
};

// log det Gamma and, optionally, the trace terms
//   T_ij = tr(Gamma^{-1} (J^{ij} (x) I)),  t_i = tr(Gamma^{-1} (J^{ii} (x) N)).
// For the stochastic method logdet is an SLQ estimate and T, t are
// Hutchinson + CG estimates.
struct LogdetTerms {
  double logdet = 0.0;
  Eigen::MatrixXd T;
  Eigen::VectorXd t;
};

class LogdetEvaluator {
 public:
  LogdetEvaluator(const Graph& g, Eigen::Index attrs, const ModelOptions& opts);

  SolveMethod method() const { return method_; }
  LogdetTerms evaluate(const Eigen::MatrixXd& H, const Eigen::VectorXd& h, bool with_traces,
                       bool with_logdet = true) const;

 private:
  const Graph& g_;
  Eigen::Index attrs_;
  ModelOptions opts_;
  SolveMethod method_;
  LaplacianSpectrum owned_spectrum_;
  const LaplacianSpectrum* spectrum_ = nullptr;
  Eigen::MatrixXd dense_N_;
};

// Omega and its (tied-symmetric) gradient from stats and log-det terms.
NllGradient assemble_gradient(const DataStats& stats, const Eigen::MatrixXd& H,
                              const Eigen::VectorXd& h, const LogdetTerms& terms);

}  // namespace gmrf::detail

#endif  // GMRF_DETAIL_MODEL_KERNEL_HPP_
