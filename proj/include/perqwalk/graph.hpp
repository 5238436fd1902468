// Copyright 2026 The perqwalk Authors
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

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace perqwalk {

using NodeIndex = std::size_t;

struct Edge {
  NodeIndex a = 0;  // a < b
  NodeIndex b = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph on nodes 0..n-1. Immutable once built.
///
/// Edges are kept as a sorted vector of (a < b) pairs, so the edge index of
/// a pair is stable and can be used to address per-edge noise sources.
class Graph {
 public:
  Graph() = default;

  /// Throws std::invalid_argument on self-loops, out-of-range endpoints or
  /// n == 0. Duplicate pairs (in either orientation) are merged.
  Graph(std::size_t n, std::vector<std::pair<NodeIndex, NodeIndex>> edges,
        std::vector<std::string> labels = {});

  std::size_t node_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t degree(NodeIndex j) const { return degree_.at(j); }
  const std::vector<std::size_t>& degrees() const { return degree_; }
  bool has_edge(NodeIndex j, NodeIndex k) const;
  std::optional<std::size_t> edge_index(NodeIndex j, NodeIndex k) const;

  bool is_regular() const;

  /// Edge indices ordered along the chain when the graph is a simple path
  /// or a simple cycle (the path starts at node 0 for rings and at the
  /// lower-numbered endpoint for open lines). Empty otherwise.
  std::optional<std::vector<std::size_t>> chain_edge_order() const;

  /// True for a single cycle through all nodes.
  bool is_cycle() const;

  Eigen::MatrixXd adjacency() const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> degree_;
  std::vector<std::string> labels_;
};

/// Open line 0-1-...-(n-1); with `periodic` the ring closes with (n-1, 0).
Graph line_graph(std::size_t n, bool periodic);
Graph complete_graph(std::size_t n);
/// Node 0 is the center.
Graph star_graph(std::size_t n);

/// Laplacian with the sign convention L_jk = A_jk (j != k), L_jj = -d_j.
Eigen::MatrixXd laplacian(const Graph& g);

/// Edge-list text format: an optional `n=<count>` header line, then one
/// `j k` pair per line. Blank lines and lines starting with '#' are skipped.
/// Without a header the node count is 1 + the largest index seen.
Graph read_edge_list(std::istream& in);
Graph load_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace perqwalk
