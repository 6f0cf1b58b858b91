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

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "gmrf/error.hpp"
#include "gmrf/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int fail(int code, const std::string& kind, const std::string& what) {
  std::cerr << "gmrf-graphlearn: " << kind << " error: " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian MRF graph learning experiments"};
  app.name("gmrf-graphlearn");
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  app.add_option("command", command, "sample | fit | predict | evaluate | estimate-r2 | spectra")
      ->required()
      ->check(CLI::IsMember({"sample", "fit", "predict", "evaluate", "estimate-r2", "spectra"}));
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", out_dir, "Override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  try {
    gmrf::ExperimentConfig cfg = gmrf::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    gmrf::refresh_resolved(cfg);
    for (const auto& path : gmrf::run_command(gmrf::parse_command(command), cfg)) {
      std::cout << path << '\n';
    }
  } catch (const gmrf::ConfigError& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const gmrf::DataError& e) {
    return fail(kExitData, "data", e.what());
  } catch (const gmrf::NumericError& e) {
    return fail(kExitNumeric, "numeric", e.what());
  } catch (const std::exception& e) {
    return fail(kExitNumeric, "numeric", e.what());
  }
  return 0;
}
