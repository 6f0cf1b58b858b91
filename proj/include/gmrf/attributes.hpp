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

#ifndef GMRF_ATTRIBUTES_HPP_
#define GMRF_ATTRIBUTES_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmrf/graph.hpp"

namespace gmrf {

// A = [X y]: one row per node, one column per attribute. The last column is
// the outcome y; columns 0..p-1 are the features X.
struct AttributeMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
  // Column means removed by centering; empty when nothing was removed.
  Eigen::VectorXd offsets;

  Eigen::Index num_nodes() const { return values.rows(); }
  // p, the number of feature columns.
  Eigen::Index num_features() const { return values.cols() - 1; }

  Eigen::MatrixXd features() const { return values.leftCols(values.cols() - 1); }
  Eigen::VectorXd outcome() const { return values.col(values.cols() - 1); }
  // The outcome on its original scale (offset added back).
  Eigen::VectorXd raw_outcome() const;

  // Subtracts each column's mean.
  static AttributeMatrix centered(Eigen::MatrixXd values, std::vector<std::string> names = {});

  // Moves the named column to the outcome position, keeping the others in order.
  // Throws ConfigError if the name is unknown.
  AttributeMatrix with_outcome(const std::string& name) const;
};

// Header row `node_id,name_1,...,name_k`, then one row per node. Every node of
// g must appear exactly once; values are centered per column. Throws
// DataError on unknown / duplicate / missing nodes and malformed cells.
AttributeMatrix load_attributes(const std::string& path, const Graph& g);

void write_attributes(const AttributeMatrix& a, const Graph& g, const std::string& path);

}  // namespace gmrf

#endif  // GMRF_ATTRIBUTES_HPP_
