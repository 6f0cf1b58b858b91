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

#ifndef GMRF_ERROR_HPP_
#define GMRF_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace gmrf {

// Error categories map onto CLI exit codes: config=1, data=2, numeric=3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by iterative solvers that exhaust their budget. Carries the final
// relative residual so callers can report it.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : NumericError(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace gmrf

#endif  // GMRF_ERROR_HPP_
