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

#ifndef GMRF_GRAPH_HPP_
#define GMRF_GRAPH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gmrf {

// Ordered set of distinct node indices in [0, n). Used for the labeled /
// unlabeled partition of a split and for induced subgraphs.
class NodeIndexSet {
 public:
  NodeIndexSet() = default;

  // Requires strictly increasing indices in [0, universe).
  NodeIndexSet(std::vector<int> indices, int universe);

  // Sorts first; duplicates are still rejected.
  static NodeIndexSet from_unsorted(std::vector<int> indices, int universe);
  static NodeIndexSet all(int universe);

  NodeIndexSet complement() const;
  bool contains(int node) const;

  int universe() const { return universe_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  int operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<int>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  // Gathers rows of a vector / matrix at these indices.
  Eigen::VectorXd gather(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m) const;
  // Writes values into the positions given by this set.
  void scatter(const Eigen::VectorXd& values, Eigen::VectorXd& into) const;

 private:
  std::vector<int> indices_;
  int universe_ = 0;
};

struct Edge {
  int src;
  int dst;
  double weight = 1.0;
};

// Undirected weighted graph in compressed sparse row form. Each undirected edge
// is stored in both endpoint rows, so the adjacency W is symmetric by
// construction. Self-loops are never stored. Immutable once built.
class Graph {
 public:
  Graph() = default;

  // Duplicate (u, v) pairs, in either orientation, merge by summing weights.
  // Throws std::invalid_argument on out-of-range endpoints, self-loops or
  // negative / non-finite weights. Zero-weight edges are dropped.
  static Graph from_edges(int n, std::span<const Edge> edges,
                          std::vector<std::string> node_ids = {});

  int num_nodes() const { return n_; }
  // Number of undirected edges with positive weight.
  std::size_t num_edges() const { return col_.size() / 2; }

  const Eigen::VectorXd& degree() const { return degree_; }
  // d_u^{-1/2}, with the convention 0 for isolated nodes.
  const Eigen::VectorXd& inv_sqrt_degree() const { return inv_sqrt_degree_; }
  // (d_u + 1)^{-1/2}.
  const Eigen::VectorXd& inv_sqrt_degree_plus_one() const { return inv_sqrt_degree_p1_; }

  std::span<const int> neighbors(int u) const {
    return {col_.data() + row_ptr_[u], col_.data() + row_ptr_[u + 1]};
  }
  std::span<const double> weights(int u) const {
    return {weight_.data() + row_ptr_[u], weight_.data() + row_ptr_[u + 1]};
  }

  // External identifiers, index-aligned with nodes. Defaults to "0".."n-1".
  const std::vector<std::string>& node_ids() const { return node_ids_; }

  // Every undirected edge once, with src < dst.
  std::vector<Edge> edge_list() const;

 private:
  int n_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> weight_;
  Eigen::VectorXd degree_;
  Eigen::VectorXd inv_sqrt_degree_;
  Eigen::VectorXd inv_sqrt_degree_p1_;
  std::vector<std::string> node_ids_;
};

// Matrix-free operator actions. The matrix overloads act column by column.
// All throw std::invalid_argument when the row count differs from n.
//
//   W  : adjacency
//   S  = D^{-1/2} W D^{-1/2}
//   N  = I - S
//   S~ = (D+I)^{-1/2} (W+I) (D+I)^{-1/2}
Eigen::VectorXd apply_adjacency(const Graph& g, const Eigen::VectorXd& v);
Eigen::MatrixXd apply_adjacency(const Graph& g, const Eigen::MatrixXd& v);
Eigen::VectorXd apply_normalized_adjacency(const Graph& g, const Eigen::VectorXd& v);
Eigen::MatrixXd apply_normalized_adjacency(const Graph& g, const Eigen::MatrixXd& v);
Eigen::VectorXd apply_normalized_laplacian(const Graph& g, const Eigen::VectorXd& v);
Eigen::MatrixXd apply_normalized_laplacian(const Graph& g, const Eigen::MatrixXd& v);
Eigen::VectorXd apply_selfloop_adjacency(const Graph& g, const Eigen::VectorXd& v);
Eigen::MatrixXd apply_selfloop_adjacency(const Graph& g, const Eigen::MatrixXd& v);

// Expression arguments (e.g. VectorXd::Ones(n)) are evaluated first and routed
// to the vector or matrix overload by their compile-time column count.
#define GMRF_EXPRESSION_OVERLOAD(fn)                                           \
  template <typename Derived>                                                 \
  auto fn(const Graph& g, const Eigen::MatrixBase<Derived>& v) {              \
    if constexpr (Derived::ColsAtCompileTime == 1) {                          \
      return fn(g, Eigen::VectorXd(v));                                       \
    } else {                                                                  \
      return fn(g, Eigen::MatrixXd(v));                                       \
    }                                                                         \
  }
GMRF_EXPRESSION_OVERLOAD(apply_adjacency)
GMRF_EXPRESSION_OVERLOAD(apply_normalized_adjacency)
GMRF_EXPRESSION_OVERLOAD(apply_normalized_laplacian)
GMRF_EXPRESSION_OVERLOAD(apply_selfloop_adjacency)
#undef GMRF_EXPRESSION_OVERLOAD

// Dense N, for the small-n exact paths.
Eigen::MatrixXd dense_normalized_laplacian(const Graph& g);

// Subgraph on the given nodes, relabeled 0..|nodes|-1 in set order.
Graph induced_subgraph(const Graph& g, const NodeIndexSet& nodes);

// Power-iteration estimate of the spectral radius of W.
double adjacency_spectral_radius(const Graph& g, int max_iterations = 500,
                                 double tolerance = 1e-10);

// Ring lattice with avg_degree/2 neighbours per side; every lattice edge
// (u, u+j) is rewired with probability rewire_prob to a uniformly chosen
// target that is neither u nor an existing neighbour of u. Edge count is
// n*avg_degree/2. Connectivity is not guaranteed.
Graph watts_strogatz(int n, int avg_degree, double rewire_prob, std::uint64_t seed);

// CSV rows `src,dst[,weight]`, weight defaulting to 1. Blank lines and lines
// starting with '#' are skipped. Node ids are arbitrary strings, mapped to
// dense indices in order of first appearance. Throws DataError.
Graph load_edge_list(const std::string& path);

void write_edge_list(const Graph& g, const std::string& path);

}  // namespace gmrf

#endif  // GMRF_GRAPH_HPP_
