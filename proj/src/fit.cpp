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

#include <cmath>
#include <limits>
#include <random>

#include "gmrf/error.hpp"
#include "gmrf/gmrf.hpp"
#include "gmrf/parallel.hpp"
#include "gmrf/random.hpp"
#include "model_kernel.hpp"

namespace gmrf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// theta = [lower-triangular entries of L, column by column, diagonal stored
// as log] ++ [log h].
class Parameterization {
 public:
  explicit Parameterization(Index k) : k_(k) {}

  Index size() const { return k_ * (k_ + 1) / 2 + k_; }

  void unpack(const VectorXd& theta, MatrixXd& L, MatrixXd& H, VectorXd& h) const {
    L = MatrixXd::Zero(k_, k_);
    Index t = 0;
    for (Index c = 0; c < k_; ++c) {
      for (Index r = c; r < k_; ++r) L(r, c) = r == c ? std::exp(theta(t++)) : theta(t++);
    }
    H = L * L.transpose();
    h = theta.tail(k_).array().exp();
  }

  VectorXd pack(const MatrixXd& L, const VectorXd& h) const {
    VectorXd theta(size());
    Index t = 0;
    for (Index c = 0; c < k_; ++c) {
      for (Index r = c; r < k_; ++r) theta(t++) = r == c ? std::log(L(r, c)) : L(r, c);
    }
    theta.tail(k_) = h.array().log();
    return theta;
  }

  // Chain rule from the tied-symmetric H gradient.
  VectorXd pull_back(const NllGradient& grad, const MatrixXd& L, const VectorXd& h) const {
    MatrixXd G = 0.5 * grad.dH;
    G.diagonal() = grad.dH.diagonal();
    const MatrixXd dL = 2.0 * G * L;
    VectorXd out(size());
    Index t = 0;
    for (Index c = 0; c < k_; ++c) {
      for (Index r = c; r < k_; ++r) out(t++) = r == c ? dL(r, c) * L(r, c) : dL(r, c);
    }
    out.tail(k_) = grad.dh.cwiseProduct(h);
    return out;
  }

 private:
  Index k_;
};

struct RestartOutcome {
  VectorXd theta;
  double nll = std::numeric_limits<double>::quiet_NaN();
  std::vector<FitTracePoint> trace;
};

VectorXd initial_theta(const Parameterization& param, const detail::DataStats& stats, Index k,
                       std::uint64_t seed, int restart) {
  MatrixXd S = stats.C / static_cast<double>(stats.n);
  S += (1e-8 * S.trace() / static_cast<double>(k) + 1e-300) * MatrixXd::Identity(k, k);
  const MatrixXd H0 = S.llt().solve(MatrixXd::Identity(k, k));
  Eigen::LLT<MatrixXd> llt(0.5 * (H0 + H0.transpose()));
  MatrixXd L0 = llt.info() == Eigen::Success ? MatrixXd(llt.matrixL())
                                             : MatrixXd(MatrixXd::Identity(k, k));
  VectorXd omega = VectorXd::Ones(k);
  if (restart > 0) {
    Rng rng(derive_seed(seed, streams::kRestart, static_cast<std::uint64_t>(restart)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(std::log(0.1), std::log(100.0));
    for (Index c = 0; c < k; ++c) {
      const double scale = L0(c, c);
      L0(c, c) *= std::exp(0.3 * normal(rng));
      for (Index r = c + 1; r < k; ++r) L0(r, c) += 0.3 * scale * normal(rng);
    }
    for (Index i = 0; i < k; ++i) omega(i) = std::exp(unif(rng));
  }
  VectorXd h(k);
  const MatrixXd H = L0 * L0.transpose();
  for (Index i = 0; i < k; ++i) h(i) = omega(i) * H(i, i);
  return param.pack(L0, h);
}

RestartOutcome run_restart(const Parameterization& param, const detail::DataStats& stats,
                           const detail::LogdetEvaluator& eval, const FitConfig& cfg, Index k,
                           int restart) {
  RestartOutcome out;
  VectorXd theta = initial_theta(param, stats, k, cfg.seed, restart);
  const bool stochastic = eval.method() == SolveMethod::kStochastic;
  MatrixXd L;
  MatrixXd H;
  VectorXd h;
  auto evaluate = [&](const VectorXd& th, bool with_traces, bool with_logdet) {
    param.unpack(th, L, H, h);
    return detail::assemble_gradient(stats, H, h, eval.evaluate(H, h, with_traces, with_logdet));
  };
  auto value_at = [&](const VectorXd& th) {
    try {
      return evaluate(th, false, true).value;
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  try {
    if (cfg.plain_gradient_descent) {
      if (stochastic) throw std::invalid_argument("fit: gradient descent mode needs an exact path");
      NllGradient grad = evaluate(theta, true, true);
      double step = cfg.learning_rate;
      for (int it = 0; it < cfg.steps; ++it) {
        if (cfg.trace_every > 0 && it % cfg.trace_every == 0) {
          out.trace.push_back({restart, it, grad.value});
        }
        const VectorXd d = param.pull_back(grad, L, h);
        const double dn2 = d.squaredNorm();
        if (dn2 == 0.0) break;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
          const VectorXd trial = theta - step * d;
          const double v = value_at(trial);
          if (v <= grad.value - 1e-4 * step * dn2) {
            const double prev = grad.value;
            theta = trial;
            grad = evaluate(theta, true, true);
            accepted = true;
            step *= 1.5;
            if (cfg.stop_tolerance > 0.0 &&
                std::abs(prev - grad.value) <= cfg.stop_tolerance * std::abs(prev)) {
              it = cfg.steps;
            }
            break;
          }
          step *= 0.5;
        }
        if (!accepted) break;
      }
      out.nll = grad.value;
    } else {
      const double b1 = 0.9;
      const double b2 = 0.999;
      const double eps = 1e-8;
      VectorXd m = VectorXd::Zero(theta.size());
      VectorXd v = VectorXd::Zero(theta.size());
      double prev = std::numeric_limits<double>::infinity();
      for (int it = 0; it < cfg.steps; ++it) {
        const bool need_value = !stochastic || (cfg.trace_every > 0 && it % cfg.trace_every == 0);
        const NllGradient grad = evaluate(theta, true, need_value);
        if (need_value && !std::isfinite(grad.value)) throw NumericError("non-finite NLL");
        if (cfg.trace_every > 0 && it % cfg.trace_every == 0) {
          out.trace.push_back({restart, it, grad.value});
        }
        if (!stochastic && cfg.stop_tolerance > 0.0 &&
            std::abs(prev - grad.value) <= cfg.stop_tolerance * std::abs(grad.value)) {
          break;
        }
        prev = grad.value;
        const VectorXd d = param.pull_back(grad, L, h);
        if (!d.allFinite()) throw NumericError("non-finite gradient");
        m = b1 * m + (1.0 - b1) * d;
        v = b2 * v + (1.0 - b2) * d.cwiseProduct(d);
        const double c1 = 1.0 - std::pow(b1, it + 1);
        const double c2 = 1.0 - std::pow(b2, it + 1);
        const VectorXd mhat = m / c1;
        const VectorXd vhat = v / c2;
        theta -= cfg.learning_rate *
                 (mhat.array() / (vhat.array().sqrt() + eps) + cfg.weight_decay * theta.array())
                     .matrix();
      }
      out.nll = value_at(theta);
    }
  } catch (const NumericError&) {
    out.nll = std::numeric_limits<double>::quiet_NaN();
  }
  if (!std::isfinite(out.nll)) out.nll = std::numeric_limits<double>::quiet_NaN();
  out.theta = std::move(theta);
  return out;
}

}  // namespace

FitResult fit(const Graph& g, const AttributeMatrix& a, const FitConfig& cfg) {
  if (cfg.restarts < 1 || cfg.steps < 0 || !(cfg.learning_rate > 0.0) || cfg.weight_decay < 0.0) {
    throw std::invalid_argument("FitConfig: restarts >= 1, steps >= 0, learning_rate > 0 required");
  }
  if (a.values.rows() != g.num_nodes() || a.values.cols() < 1) {
    throw std::invalid_argument("fit: attribute matrix does not match the graph");
  }
  const Index k = a.values.cols();
  const auto stats = detail::DataStats::compute(g, a.values);
  ModelOptions model = cfg.model;
  if (model.method == SolveMethod::kAuto && g.num_nodes() <= model.spectral_threshold) {
    model.method = SolveMethod::kSpectral;
  }
  const detail::LogdetEvaluator eval(g, k, model);
  const Parameterization param(k);

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  parallel_for(outcomes.size(), [&](std::size_t r) {
    outcomes[r] = run_restart(param, stats, eval, cfg, k, static_cast<int>(r));
  });

  FitResult result;
  int best = -1;
  for (int r = 0; r < cfg.restarts; ++r) {
    result.restart_nll.push_back(outcomes[r].nll);
    if (std::isnan(outcomes[r].nll)) continue;
    if (best < 0 || outcomes[r].nll < outcomes[best].nll) best = r;
  }
  if (best < 0) {
    throw NumericError("fit: all " + std::to_string(cfg.restarts) +
                       " restarts diverged (non-finite likelihood or non-SPD iterate)");
  }
  MatrixXd L;
  MatrixXd H;
  VectorXd h;
  param.unpack(outcomes[best].theta, L, H, h);
  result.params = GmrfParams(0.5 * (H + H.transpose()), h);
  result.nll = outcomes[best].nll;
  result.best_restart = best;
  result.trace = std::move(outcomes[best].trace);
  return result;
}

}  // namespace gmrf
