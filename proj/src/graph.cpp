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

#include "gmrf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "gmrf/csv.hpp"
#include "gmrf/error.hpp"
#include "gmrf/random.hpp"

namespace gmrf {

NodeIndexSet::NodeIndexSet(std::vector<int> indices, int universe)
    : indices_(std::move(indices)), universe_(universe) {
  if (universe < 0) throw std::invalid_argument("NodeIndexSet: negative universe");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    const int v = indices_[i];
    if (v < 0 || v >= universe) {
      throw std::invalid_argument("NodeIndexSet: index " + std::to_string(v) +
                                  " outside [0, " + std::to_string(universe) + ")");
    }
    if (i > 0 && indices_[i - 1] >= v) {
      throw std::invalid_argument("NodeIndexSet: indices must be strictly increasing");
    }
  }
}

NodeIndexSet NodeIndexSet::from_unsorted(std::vector<int> indices, int universe) {
  std::sort(indices.begin(), indices.end());
  return NodeIndexSet(std::move(indices), universe);
}

NodeIndexSet NodeIndexSet::all(int universe) {
  std::vector<int> idx(static_cast<std::size_t>(universe));
  for (int i = 0; i < universe; ++i) idx[i] = i;
  return NodeIndexSet(std::move(idx), universe);
}

NodeIndexSet NodeIndexSet::complement() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(universe_) - indices_.size());
  std::size_t j = 0;
  for (int v = 0; v < universe_; ++v) {
    if (j < indices_.size() && indices_[j] == v) {
      ++j;
    } else {
      out.push_back(v);
    }
  }
  return NodeIndexSet(std::move(out), universe_);
}

bool NodeIndexSet::contains(int node) const {
  return std::binary_search(indices_.begin(), indices_.end(), node);
}

Eigen::VectorXd NodeIndexSet::gather(const Eigen::VectorXd& v) const {
  if (v.size() != universe_) throw std::invalid_argument("gather: length mismatch");
  Eigen::VectorXd out(static_cast<Eigen::Index>(indices_.size()));
  for (std::size_t i = 0; i < indices_.size(); ++i) out(i) = v(indices_[i]);
  return out;
}

Eigen::MatrixXd NodeIndexSet::gather_rows(const Eigen::MatrixXd& m) const {
  if (m.rows() != universe_) throw std::invalid_argument("gather_rows: row mismatch");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices_.size()), m.cols());
  for (std::size_t i = 0; i < indices_.size(); ++i) out.row(i) = m.row(indices_[i]);
  return out;
}

void NodeIndexSet::scatter(const Eigen::VectorXd& values, Eigen::VectorXd& into) const {
  if (values.size() != static_cast<Eigen::Index>(indices_.size()) || into.size() != universe_) {
    throw std::invalid_argument("scatter: length mismatch");
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) into(indices_[i]) = values(i);
}

Graph Graph::from_edges(int n, std::span<const Edge> edges, std::vector<std::string> node_ids) {
  if (n < 0) throw std::invalid_argument("Graph: negative node count");
  if (!node_ids.empty() && node_ids.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("Graph: node id table has wrong length");
  }
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(n));
  for (const Edge& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      throw std::invalid_argument("Graph: edge endpoint out of range");
    }
    if (e.src == e.dst) throw std::invalid_argument("Graph: self-loops are not allowed");
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw std::invalid_argument("Graph: edge weights must be finite and nonnegative");
    }
    rows[e.src].emplace_back(e.dst, e.weight);
    rows[e.dst].emplace_back(e.src, e.weight);
  }

  Graph g;
  g.n_ = n;
  g.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  g.degree_ = Eigen::VectorXd::Zero(n);
  for (int u = 0; u < n; ++u) {
    auto& r = rows[u];
    std::sort(r.begin(), r.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t k = 0;
    while (k < r.size()) {
      const int v = r[k].first;
      double w = 0.0;
      // Sum in sorted order of (neighbor, weight) so merging is independent of
      // input order.
      std::size_t end = k;
      while (end < r.size() && r[end].first == v) ++end;
      std::vector<double> ws;
      for (std::size_t t = k; t < end; ++t) ws.push_back(r[t].second);
      std::sort(ws.begin(), ws.end());
      for (double x : ws) w += x;
      if (w > 0.0) {
        g.col_.push_back(v);
        g.weight_.push_back(w);
        g.degree_(u) += w;
      }
      k = end;
    }
    g.row_ptr_[u + 1] = static_cast<std::int64_t>(g.col_.size());
  }
  g.inv_sqrt_degree_.resize(n);
  g.inv_sqrt_degree_p1_.resize(n);
  for (int u = 0; u < n; ++u) {
    const double d = g.degree_(u);
    g.inv_sqrt_degree_(u) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    g.inv_sqrt_degree_p1_(u) = 1.0 / std::sqrt(d + 1.0);
  }
  if (node_ids.empty()) {
    node_ids.reserve(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) node_ids.push_back(std::to_string(u));
  }
  g.node_ids_ = std::move(node_ids);
  return g;
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (int u = 0; u < n_; ++u) {
    auto nb = neighbors(u);
    auto w = weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (u < nb[k]) out.push_back({u, nb[k], w[k]});
    }
  }
  return out;
}

namespace {

void check_rows(const Graph& g, Eigen::Index rows, const char* what) {
  if (rows != g.num_nodes()) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(g.num_nodes()) + " rows, got " +
                                std::to_string(rows));
  }
}

// out = diag(left) * (W + self * I) * diag(right) * in
Eigen::MatrixXd scaled_adjacency(const Graph& g, const Eigen::MatrixXd& in,
                                 const Eigen::VectorXd* left, const Eigen::VectorXd* right,
                                 double self) {
  const int n = g.num_nodes();
  Eigen::MatrixXd scaled = in;
  if (right) scaled = right->asDiagonal() * in;
  Eigen::MatrixXd out(n, in.cols());
  for (int u = 0; u < n; ++u) {
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    for (Eigen::Index c = 0; c < in.cols(); ++c) {
      double acc = self * scaled(u, c);
      for (std::size_t k = 0; k < nb.size(); ++k) acc += w[k] * scaled(nb[k], c);
      out(u, c) = acc;
    }
  }
  if (left) out = left->asDiagonal() * out;
  return out;
}

}  // namespace

Eigen::MatrixXd apply_adjacency(const Graph& g, const Eigen::MatrixXd& v) {
  check_rows(g, v.rows(), "apply_adjacency");
  return scaled_adjacency(g, v, nullptr, nullptr, 0.0);
}

Eigen::VectorXd apply_adjacency(const Graph& g, const Eigen::VectorXd& v) {
  return apply_adjacency(g, Eigen::MatrixXd(v)).col(0);
}

Eigen::MatrixXd apply_normalized_adjacency(const Graph& g, const Eigen::MatrixXd& v) {
  check_rows(g, v.rows(), "apply_normalized_adjacency");
  return scaled_adjacency(g, v, &g.inv_sqrt_degree(), &g.inv_sqrt_degree(), 0.0);
}

Eigen::VectorXd apply_normalized_adjacency(const Graph& g, const Eigen::VectorXd& v) {
  return apply_normalized_adjacency(g, Eigen::MatrixXd(v)).col(0);
}

Eigen::MatrixXd apply_normalized_laplacian(const Graph& g, const Eigen::MatrixXd& v) {
  check_rows(g, v.rows(), "apply_normalized_laplacian");
  return v - scaled_adjacency(g, v, &g.inv_sqrt_degree(), &g.inv_sqrt_degree(), 0.0);
}

Eigen::VectorXd apply_normalized_laplacian(const Graph& g, const Eigen::VectorXd& v) {
  return apply_normalized_laplacian(g, Eigen::MatrixXd(v)).col(0);
}

Eigen::MatrixXd apply_selfloop_adjacency(const Graph& g, const Eigen::MatrixXd& v) {
  check_rows(g, v.rows(), "apply_selfloop_adjacency");
  return scaled_adjacency(g, v, &g.inv_sqrt_degree_plus_one(), &g.inv_sqrt_degree_plus_one(),
                          1.0);
}

Eigen::VectorXd apply_selfloop_adjacency(const Graph& g, const Eigen::VectorXd& v) {
  return apply_selfloop_adjacency(g, Eigen::MatrixXd(v)).col(0);
}

Eigen::MatrixXd dense_normalized_laplacian(const Graph& g) {
  const int n = g.num_nodes();
  Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n);
  const auto& s = g.inv_sqrt_degree();
  for (int u = 0; u < n; ++u) {
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) N(u, nb[k]) -= s(u) * w[k] * s(nb[k]);
  }
  return N;
}

Graph induced_subgraph(const Graph& g, const NodeIndexSet& nodes) {
  if (nodes.universe() != g.num_nodes()) {
    throw std::invalid_argument("induced_subgraph: node set built for a different graph");
  }
  std::vector<int> local(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<int>(i);
  std::vector<Edge> edges;
  std::vector<std::string> ids;
  ids.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int u = nodes[i];
    ids.push_back(g.node_ids()[u]);
    auto nb = g.neighbors(u);
    auto w = g.weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const int v = local[nb[k]];
      if (v > static_cast<int>(i)) edges.push_back({static_cast<int>(i), v, w[k]});
    }
  }
  const int n = static_cast<int>(nodes.size());
  return Graph::from_edges(n, edges, std::move(ids));
}

double adjacency_spectral_radius(const Graph& g, int max_iterations, double tolerance) {
  const int n = g.num_nodes();
  if (n == 0 || g.num_edges() == 0) return 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double norm = x.norm();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd y = apply_adjacency(g, x);
    const double next_norm = y.norm();
    if (next_norm == 0.0) return 0.0;
    const double ratio = next_norm / norm;
    x = y / next_norm;
    norm = 1.0;
    if (it > 0 && std::abs(ratio - estimate) <= tolerance * ratio) return ratio;
    estimate = ratio;
  }
  return estimate;
}

Graph watts_strogatz(int n, int avg_degree, double rewire_prob, std::uint64_t seed) {
  if (avg_degree < 0 || avg_degree % 2 != 0) {
    throw std::invalid_argument("watts_strogatz: avg_degree must be even and nonnegative");
  }
  if (avg_degree >= n) throw std::invalid_argument("watts_strogatz: avg_degree must be < n");
  if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0)) {
    throw std::invalid_argument("watts_strogatz: rewire_prob must lie in [0, 1]");
  }
  const int half = avg_degree / 2;
  std::vector<std::unordered_set<int>> adj(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    for (int j = 1; j <= half; ++j) {
      const int v = (u + j) % n;
      adj[u].insert(v);
      adj[v].insert(u);
    }
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int j = 1; j <= half; ++j) {
    for (int u = 0; u < n; ++u) {
      const int v = (u + j) % n;
      if (coin(rng) >= rewire_prob) continue;
      if (!adj[u].count(v)) continue;  // already rewired away from this slot
      if (static_cast<int>(adj[u].size()) >= n - 1) continue;
      int w = pick(rng);
      while (w == u || adj[u].count(w)) w = pick(rng);
      adj[u].erase(v);
      adj[v].erase(u);
      adj[u].insert(w);
      adj[w].insert(u);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * half);
  for (int u = 0; u < n; ++u) {
    std::vector<int> nb(adj[u].begin(), adj[u].end());
    std::sort(nb.begin(), nb.end());
    for (int v : nb) {
      if (u < v) edges.push_back({u, v, 1.0});
    }
  }
  return Graph::from_edges(n, edges);
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list: " + path);
  std::unordered_map<std::string, int> index;
  std::vector<std::string> ids;
  std::vector<Edge> edges;
  auto id_of = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, static_cast<int>(ids.size()));
    if (inserted) ids.push_back(s);
    return it->second;
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = csv::split_line(line);
    if (fields.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() < 2 || fields.size() > 3) {
      throw DataError(where + ": expected src,dst[,weight]");
    }
    if (fields[0].empty() || fields[1].empty()) throw DataError(where + ": empty node id");
    double w = 1.0;
    if (fields.size() == 3) w = csv::parse_double(fields[2], where);
    if (w < 0.0) throw DataError(where + ": negative edge weight");
    const int a = id_of(fields[0]);
    const int b = id_of(fields[1]);
    if (a == b) throw DataError(where + ": self-loop on node " + fields[0]);
    edges.push_back({a, b, w});
  }
  const int n = static_cast<int>(ids.size());
  return Graph::from_edges(n, edges, std::move(ids));
}

void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write edge list: " + path);
  for (const Edge& e : g.edge_list()) {
    out << g.node_ids()[e.src] << ',' << g.node_ids()[e.dst] << ',' << csv::format_double(e.weight)
        << '\n';
  }
}

}  // namespace gmrf
