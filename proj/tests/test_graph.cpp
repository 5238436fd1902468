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

#include <sstream>
#include <stdexcept>

#include <doctest.h>

#include "perqwalk/graph.hpp"

using namespace perqwalk;

TEST_SUITE("graph") {

TEST_CASE("ring of three") {
  const auto g = line_graph(3, true);
  REQUIRE(g.edge_count() == 3);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.edges()[1] == Edge{0, 2});
  CHECK(g.edges()[2] == Edge{1, 2});
  for (std::size_t j = 0; j < 3; ++j) CHECK(g.degree(j) == 2);
  CHECK(g.is_cycle());
  CHECK(g.is_regular());
}

TEST_CASE("smallest open line") {
  const auto g = line_graph(2, false);
  REQUIRE(g.edge_count() == 1);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);
  CHECK_FALSE(g.is_cycle());
}

TEST_CASE("ring laplacian diagonal is minus two") {
  const auto l = laplacian(line_graph(5, true));
  for (int j = 0; j < 5; ++j) CHECK(l(j, j) == -2.0);
  CHECK(l(0, 4) == 1.0);
  CHECK(l(0, 2) == 0.0);
}

TEST_CASE("line rejects too few nodes") {
  CHECK_THROWS_AS(line_graph(1, false), std::invalid_argument);
  CHECK_THROWS_AS(line_graph(2, true), std::invalid_argument);
}

TEST_CASE("complete graph") {
  CHECK(complete_graph(4).edge_count() == 6);
  CHECK(complete_graph(2).edge_count() == 1);
  const auto g = complete_graph(5);
  for (std::size_t j = 0; j < 5; ++j) CHECK(g.degree(j) == 4);
  const auto l = laplacian(complete_graph(3));
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) CHECK(l(j, k) == (j == k ? -2.0 : 1.0));
  }
}

TEST_CASE("star graph") {
  const auto g = star_graph(5);
  REQUIRE(g.edge_count() == 4);
  for (std::size_t k = 1; k < 5; ++k) CHECK(g.edges()[k - 1] == Edge{0, k});
  CHECK(star_graph(2).edges() == line_graph(2, false).edges());
  const auto l = laplacian(star_graph(3));
  CHECK(l(0, 0) == -2.0);
  CHECK(l(1, 1) == -1.0);
  CHECK(l(2, 2) == -1.0);
}

TEST_CASE("laplacian rows sum to zero") {
  for (const auto& g : {line_graph(7, false), line_graph(9, true), complete_graph(6),
                        star_graph(8), Graph(5, {{0, 3}, {3, 4}, {1, 2}})}) {
    const auto l = laplacian(g);
    for (Eigen::Index j = 0; j < l.rows(); ++j) CHECK(l.row(j).sum() == 0.0);
    CHECK((l - l.transpose()).norm() == 0.0);
  }
}

TEST_CASE("constructor validation and dedup") {
  CHECK_THROWS_AS(Graph(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), std::invalid_argument);
  const Graph g(3, {{1, 0}, {0, 1}, {2, 1}});
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(g.edge_index(2, 1) == std::optional<std::size_t>(1));
  CHECK_FALSE(g.edge_index(0, 2).has_value());
}

TEST_CASE("chain order walks the path") {
  const auto ring = line_graph(5, true);
  const auto order = ring.chain_edge_order();
  REQUIRE(order.has_value());
  REQUIRE(order->size() == 5);
  // Consecutive edges share a node and the walk starts 0 -> 1.
  CHECK(ring.edges()[order->front()] == Edge{0, 1});
  for (std::size_t i = 0; i + 1 < order->size(); ++i) {
    const auto& a = ring.edges()[(*order)[i]];
    const auto& b = ring.edges()[(*order)[i + 1]];
    CHECK((a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b));
  }
  CHECK(line_graph(6, false).chain_edge_order()->size() == 5);
  CHECK_FALSE(star_graph(5).chain_edge_order().has_value());
  CHECK_FALSE(complete_graph(4).chain_edge_order().has_value());
}

TEST_CASE("edge list round trip") {
  const auto g = star_graph(6);
  std::stringstream ss;
  write_edge_list(ss, g);
  const auto back = read_edge_list(ss);
  CHECK(back.node_count() == g.node_count());
  CHECK(back.edges() == g.edges());
}

TEST_CASE("edge list parsing") {
  std::istringstream in("# comment\nn=4\n0 1\n\n1 2  # trailing\n");
  const auto g = read_edge_list(in);
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 2);
  CHECK(g.degree(3) == 0);

  std::istringstream implicit("0 1\n1 5\n");
  CHECK(read_edge_list(implicit).node_count() == 6);

  std::istringstream bad("0 x\n");
  CHECK_THROWS_AS(read_edge_list(bad), std::invalid_argument);
  std::istringstream late("0 1\nn=3\n");
  CHECK_THROWS_AS(read_edge_list(late), std::invalid_argument);
  CHECK_THROWS(load_edge_list("/nonexistent/graph.txt"));
}

}  // TEST_SUITE
