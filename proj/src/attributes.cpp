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

#include "gmrf/attributes.hpp"

#include <fstream>
#include <unordered_map>

#include "gmrf/csv.hpp"
#include "gmrf/error.hpp"

namespace gmrf {

AttributeMatrix AttributeMatrix::centered(Eigen::MatrixXd values, std::vector<std::string> names) {
  if (names.empty()) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) names.push_back("a" + std::to_string(j));
  }
  if (static_cast<Eigen::Index>(names.size()) != values.cols()) {
    throw std::invalid_argument("AttributeMatrix: name count does not match columns");
  }
  Eigen::VectorXd means = Eigen::VectorXd::Zero(values.cols());
  if (values.rows() > 0) {
    means = values.colwise().mean().transpose();
    values.rowwise() -= means.transpose();
  }
  return AttributeMatrix{std::move(values), std::move(names), std::move(means)};
}

Eigen::VectorXd AttributeMatrix::raw_outcome() const {
  Eigen::VectorXd y = outcome();
  if (offsets.size() == values.cols()) y.array() += offsets(values.cols() - 1);
  return y;
}

AttributeMatrix AttributeMatrix::with_outcome(const std::string& name) const {
  Eigen::Index target = -1;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) target = static_cast<Eigen::Index>(j);
  }
  if (target < 0) throw ConfigError("outcome column '" + name + "' not found in attributes");
  AttributeMatrix out;
  const bool has_offsets = offsets.size() == values.cols();
  out.values.resize(values.rows(), values.cols());
  if (has_offsets) out.offsets.resize(values.cols());
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    if (j == target) continue;
    if (has_offsets) out.offsets(k) = offsets(j);
    out.values.col(k++) = values.col(j);
    out.names.push_back(names[j]);
  }
  if (has_offsets) out.offsets(k) = offsets(target);
  out.values.col(k) = values.col(target);
  out.names.push_back(name);
  return out;
}

AttributeMatrix load_attributes(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open attribute file: " + path);
  std::unordered_map<std::string, int> index;
  for (int u = 0; u < g.num_nodes(); ++u) index.emplace(g.node_ids()[u], u);

  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    header = csv::split_line(line);
  }
  if (header.size() < 2) throw DataError(path + ": header needs node_id and at least one column");
  const std::size_t k = header.size() - 1;
  Eigen::MatrixXd values(g.num_nodes(), static_cast<Eigen::Index>(k));
  std::vector<bool> seen(static_cast<std::size_t>(g.num_nodes()), false);
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = csv::split_line(line);
    if (fields.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    auto it = index.find(fields[0]);
    if (it == index.end()) throw DataError(where + ": unknown node id '" + fields[0] + "'");
    const int u = it->second;
    if (seen[u]) throw DataError(where + ": duplicate row for node '" + fields[0] + "'");
    seen[u] = true;
    for (std::size_t j = 0; j < k; ++j) values(u, j) = csv::parse_double(fields[j + 1], where);
  }
  for (int u = 0; u < g.num_nodes(); ++u) {
    if (!seen[u]) throw DataError(path + ": no attribute row for node '" + g.node_ids()[u] + "'");
  }
  return AttributeMatrix::centered(std::move(values),
                                   std::vector<std::string>(header.begin() + 1, header.end()));
}

void write_attributes(const AttributeMatrix& a, const Graph& g, const std::string& path) {
  if (a.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("write_attributes: row count does not match graph");
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write attributes: " + path);
  out << "node_id";
  for (const auto& n : a.names) out << ',' << n;
  out << '\n';
  for (int u = 0; u < g.num_nodes(); ++u) {
    out << g.node_ids()[u];
    for (Eigen::Index j = 0; j < a.values.cols(); ++j) {
      out << ',' << csv::format_double(a.values(u, j));
    }
    out << '\n';
  }
}

}  // namespace gmrf
