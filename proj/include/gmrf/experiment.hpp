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

#ifndef GMRF_EXPERIMENT_HPP_
#define GMRF_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmrf/algorithms.hpp"
#include "gmrf/eval.hpp"
#include "gmrf/gmrf.hpp"

namespace gmrf {

// Version of the output schema, written into every JSON summary.
inline constexpr const char* kSchemaVersion = "1.0";

enum class Command { kSample, kFit, kPredict, kEvaluate, kEstimateR2, kSpectra };

// Throws ConfigError for unknown names.
Command parse_command(const std::string& name);
std::string command_name(Command c);

struct SyntheticInput {
  int n = 1000;
  int avg_degree = 6;
  double rewire_prob = 0.01;
  int p = 4;
  double h0 = 10.0;
};

struct InputSpec {
  std::optional<SyntheticInput> synthetic;
  std::string edges;
  std::string attributes;
};

struct SpectraSpec {
  int lambda_count = 101;
  std::vector<FilterSpec> filters;
  // Also write the Laplacian eigenvalues of the input graph.
  bool graph_spectrum = false;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  InputSpec input;
  // Second graph for inductive runs (synthetic inputs draw a fresh one).
  bool inductive = false;
  InputSpec inductive_input;
  std::string params_path;
  // Empty: last column. "*": every column in turn.
  std::string outcome;
  double train_fraction = 0.3;
  // predict only: file of labeled node ids, one per line. Empty: random split.
  std::string labeled_nodes;
  int repeats = 10;
  std::vector<Algorithm> algorithms = {Algorithm::kLP, Algorithm::kLR, Algorithm::kLGC,
                                       Algorithm::kSGC, Algorithm::kLGCRP, Algorithm::kSGCRP};
  // Skips cross validation when set.
  std::optional<Hyperparameters> fixed;
  CvPlan cv;
  // LinBP on binary labels (F1 metric only); eps = fraction * 2 / rho(W).
  std::optional<double> linbp_eps_fraction;
  ModelOptions model;
  FitConfig fit;
  // estimate-r2: fit the model to the data first (true) or use the given /
  // generating parameters (false).
  bool r2_from_fitted = true;
  std::vector<std::string> conditional_on;
  SpectraSpec spectra;
  // Every setting after defaults, echoed into outputs.
  nlohmann::ordered_json resolved;
};

// Parses a JSON config. Unknown keys, wrong types and out-of-range values
// throw ConfigError. Relative input paths are resolved against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

// Re-resolves after changing seed or output_dir programmatically.
void refresh_resolved(ExperimentConfig& cfg);

// Runs a command and returns the files it wrote. Every output is a pure
// function of the config (including its seed).
std::vector<std::string> run_command(Command c, const ExperimentConfig& cfg);

}  // namespace gmrf

#endif  // GMRF_EXPERIMENT_HPP_
