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

#include "perqwalk/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace perqwalk {

Graph::Graph(std::size_t n, std::vector<std::pair<NodeIndex, NodeIndex>> edges,
             std::vector<std::string> labels)
    : n_(n), degree_(n, 0), labels_(std::move(labels)) {
  if (n == 0) {
    throw std::invalid_argument("graph must have at least one node");
  }
  if (!labels_.empty() && labels_.size() != n) {
    throw std::invalid_argument("label count " + std::to_string(labels_.size()) +
                                " does not match node count " + std::to_string(n));
  }
  edges_.reserve(edges.size());
  for (auto [j, k] : edges) {
    if (j == k) {
      throw std::invalid_argument("self-loop at node " + std::to_string(j));
    }
    if (j >= n || k >= n) {
      throw std::invalid_argument("edge (" + std::to_string(j) + ", " + std::to_string(k) +
                                  ") outside node range [0, " + std::to_string(n) + ")");
    }
    edges_.push_back(Edge{std::min(j, k), std::max(j, k)});
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& e : edges_) {
    ++degree_[e.a];
    ++degree_[e.b];
  }
}

std::optional<std::size_t> Graph::edge_index(NodeIndex j, NodeIndex k) const {
  Edge key{std::min(j, k), std::max(j, k)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

bool Graph::has_edge(NodeIndex j, NodeIndex k) const {
  return j != k && edge_index(j, k).has_value();
}

bool Graph::is_regular() const {
  return std::all_of(degree_.begin(), degree_.end(),
                     [&](std::size_t d) { return d == degree_.front(); });
}

bool Graph::is_cycle() const {
  if (n_ < 3 || edges_.size() != n_) return false;
  auto order = chain_edge_order();
  return order.has_value();
}

std::optional<std::vector<std::size_t>> Graph::chain_edge_order() const {
  if (edges_.empty()) return std::nullopt;
  if (std::any_of(degree_.begin(), degree_.end(), [](std::size_t d) { return d > 2; })) {
    return std::nullopt;
  }
  const bool cycle = edges_.size() == n_;
  if (!cycle && edges_.size() + 1 != n_) return std::nullopt;

  std::vector<std::vector<std::size_t>> incident(n_);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    incident[edges_[e].a].push_back(e);
    incident[edges_[e].b].push_back(e);
  }
  NodeIndex start = 0;
  if (!cycle) {
    auto it = std::find(degree_.begin(), degree_.end(), std::size_t{1});
    if (it == degree_.end()) return std::nullopt;
    start = static_cast<NodeIndex>(it - degree_.begin());
  }

  std::vector<std::size_t> order;
  order.reserve(edges_.size());
  std::vector<bool> used(edges_.size(), false);
  NodeIndex at = start;
  while (order.size() < edges_.size()) {
    // For rings, leave node 0 toward its lower-numbered neighbor's edge first
    // so that the chain runs 0-1-2-...
    std::optional<std::size_t> next;
    for (std::size_t e : incident[at]) {
      if (used[e]) continue;
      NodeIndex other = edges_[e].a == at ? edges_[e].b : edges_[e].a;
      if (!next) {
        next = e;
      } else {
        const auto& cur = edges_[*next];
        NodeIndex cur_other = cur.a == at ? cur.b : cur.a;
        if (other < cur_other) next = e;
      }
    }
    if (!next) return std::nullopt;  // disconnected
    used[*next] = true;
    order.push_back(*next);
    at = edges_[*next].a == at ? edges_[*next].b : edges_[*next].a;
  }
  if (cycle && at != start) return std::nullopt;
  return order;
}

Eigen::MatrixXd Graph::adjacency() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : edges_) {
    a(static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(e.b)) = 1.0;
    a(static_cast<Eigen::Index>(e.b), static_cast<Eigen::Index>(e.a)) = 1.0;
  }
  return a;
}

Graph line_graph(std::size_t n, bool periodic) {
  const std::size_t min_nodes = periodic ? 3 : 2;
  if (n < min_nodes) {
    throw std::invalid_argument(std::string(periodic ? "ring" : "line") + " needs at least " +
                                std::to_string(min_nodes) + " nodes, got " + std::to_string(n));
  }
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  for (std::size_t j = 0; j + 1 < n; ++j) edges.emplace_back(j, j + 1);
  if (periodic) edges.emplace_back(n - 1, 0);
  return Graph(n, std::move(edges));
}

Graph complete_graph(std::size_t n) {
  if (n < 2) {
    throw std::invalid_argument("complete graph needs at least 2 nodes, got " + std::to_string(n));
  }
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) edges.emplace_back(j, k);
  }
  return Graph(n, std::move(edges));
}

Graph star_graph(std::size_t n) {
  if (n < 2) {
    throw std::invalid_argument("star graph needs at least 2 nodes, got " + std::to_string(n));
  }
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  for (std::size_t k = 1; k < n; ++k) edges.emplace_back(0, k);
  return Graph(n, std::move(edges));
}

Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd l = g.adjacency();
  for (std::size_t j = 0; j < g.node_count(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    l(i, i) = -static_cast<double>(g.degree(j));
  }
  return l;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::optional<std::size_t> declared;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    if (line.rfind("n=", 0) == 0) {
      if (declared || !edges.empty()) {
        throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                    ": header n=<count> must come first and only once");
      }
      std::istringstream hs(line.substr(2));
      long long count = -1;
      if (!(hs >> count) || count < 1 || !(hs >> std::ws).eof()) {
        throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                    ": malformed header '" + line + "'");
      }
      declared = static_cast<std::size_t>(count);
      continue;
    }
    std::istringstream ls(line);
    long long j = -1;
    long long k = -1;
    if (!(ls >> j >> k) || j < 0 || k < 0 || !(ls >> std::ws).eof()) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected two non-negative integers, got '" + line + "'");
    }
    edges.emplace_back(static_cast<NodeIndex>(j), static_cast<NodeIndex>(k));
    max_index = std::max({max_index, static_cast<std::size_t>(j), static_cast<std::size_t>(k)});
  }
  std::size_t n = declared ? *declared : (edges.empty() ? 0 : max_index + 1);
  return Graph(n, std::move(edges));
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open edge list '" + path.string() + "'");
  }
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n=" << g.node_count() << '\n';
  for (const auto& e : g.edges()) out << e.a << ' ' << e.b << '\n';
}

}  // namespace perqwalk
