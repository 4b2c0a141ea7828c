// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "parastrat/model_zoo.hpp"
#include "parastrat/ordering.hpp"
#include "support/oracles.hpp"

using namespace parastrat;

namespace {

NodeSpec ew(NodeId id) {
  return NodeSpec{id, "e" + std::to_string(id), LayerKind::elementwise,
                  {{"b", 4, DimRole::batch}, {"c", 4, DimRole::channel_in}},
                  {0, 1}, 4};
}

ComputationGraph path_graph(int n) {
  std::vector<NodeSpec> nodes;
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) nodes.push_back(ew(i));
  for (int i = 1; i < n; ++i) edges.push_back({i, i + 1, {0, 1}});
  return ComputationGraph::build(std::move(nodes), std::move(edges));
}

ComputationGraph star_graph() {
  return ComputationGraph::build({ew(1), ew(2), ew(3), ew(4)},
                                 {{1, 2, {0, 1}}, {1, 3, {0, 1}}, {1, 4, {0, 1}}});
}

ComputationGraph toy() { return build_toy_fig3(ModelSpec{ModelFamily::toy_fig3}); }

Ordering identity(int n) {
  std::vector<NodeId> seq;
  for (int i = 1; i <= n; ++i) seq.push_back(i);
  return Ordering::from_sequence(seq);
}

// Checks the breadth-first property: each node after the first is adjacent
// to an earlier node, and nodes are dequeued in discovery order.
bool is_bfs_order(const ComputationGraph &g, const Ordering &ord) {
  std::vector<int> parent_rank;
  for (size_t i = 1; i < ord.size(); ++i) {
    int first = -1;
    for (NodeId u : neighbors(g, ord.seq[i])) {
      const int r = ord.position.at(u);
      if (r < static_cast<int>(i) && (first < 0 || r < first)) first = r;
    }
    if (first < 0) return false;
    parent_rank.push_back(first);
  }
  return std::is_sorted(parent_rank.begin(), parent_rank.end());
}

}  // namespace

TEST_CASE("breadth-first order") {
  CHECK(bfs_order(path_graph(3)).seq == std::vector<NodeId>{1, 2, 3});
  CHECK(bfs_order(star_graph()).seq == std::vector<NodeId>{1, 2, 3, 4});
  auto g = toy();
  auto ord = bfs_order(g);
  ord.check(g);
  CHECK(is_bfs_order(g, ord));
}

TEST_CASE("toy graph sets at rank 5") {
  auto g = toy();
  auto ord = identity(9);
  const int i = 4;  // fifth node
  CHECK(connected_set(g, ord, i) == NodeSet{1, 2, 3, 5});
  CHECK(connected_subsets(g, ord, i) == std::vector<NodeSet>{{1, 2}, {3}});
  CHECK(dependent_set_definitional(g, ord, i) == NodeSet{8});
  CHECK(bfs_dependent_set(g, ord, i) == NodeSet{7, 8, 9});
}

TEST_CASE("toy graph breadth-first dependent sets") {
  auto g = toy();
  // Node 8 is the only source, and its four neighbors all follow it at once.
  auto ord = bfs_order(g);
  CHECK(ord.seq.front() == 8);
  size_t peak = 0;
  for (const auto &d : bfs_dependent_sets(g, ord)) peak = std::max(peak, d.size());
  CHECK(peak == 4);
  // A breadth-first order started at node 5 peaks at three, at the fifth rank.
  auto from5 = Ordering::from_sequence({5, 3, 8, 2, 7, 6, 1, 4, 9});
  CHECK(is_bfs_order(g, from5));
  auto sets = bfs_dependent_sets(g, from5);
  size_t peak5 = 0;
  for (const auto &d : sets) peak5 = std::max(peak5, d.size());
  CHECK(peak5 == 3);
  CHECK(sets[4].size() == 3);
  // Under the drawn order the fifth rank depends on three later nodes.
  CHECK(bfs_dependent_sets(g, identity(9))[4] == NodeSet{7, 8, 9});
}

TEST_CASE("toy graph greedy order keeps one dependent at the pivot") {
  auto g = toy();
  auto res = sort_nodes(g);
  CHECK(res.dependent == dependent_sets(g, res.order));
  // Under the greedy order, the rank of node 5 still depends only on node 8
  // or on nothing at all.
  const int r5 = res.order.position.at(5);
  CHECK(res.dependent[r5].size() <= 1);
}

TEST_CASE("edge ranks") {
  auto g = toy();
  auto ord = identity(9);
  CHECK(connected_set(g, ord, 0) == NodeSet{1});
  CHECK(connected_subsets(g, ord, 0).empty());
  CHECK(connected_set(g, ord, 8) == NodeSet{1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(dependent_set_definitional(g, ord, 8).empty());
  CHECK_THROWS_AS(connected_set(g, ord, 9), std::out_of_range);
}

TEST_CASE("path graphs") {
  auto g = path_graph(12);
  auto ord = identity(12);
  for (int k = 1; k < 12; ++k) {
    auto subs = connected_subsets(g, ord, k);
    REQUIRE(subs.size() == 1);
    CHECK(subs[0].size() == static_cast<size_t>(k));
  }
  for (const auto &d : sort_nodes(g).dependent) CHECK(d.size() <= 1);
  for (const auto &d : dependent_sets(g, ord)) CHECK(d.size() <= 1);
}

TEST_CASE("incremental sets equal the definition on random graphs") {
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> density(0.0, 0.5);
  for (int trial = 0; trial < 300; ++trial) {
    auto g = oracle::random_graph(rng, size(rng), density(rng));
    auto res = sort_nodes(g);
    res.order.check(g);
    for (int i = 0; i < static_cast<int>(g.size()); ++i) {
      CHECK(res.dependent[i] == dependent_set_definitional(g, res.order, i));
    }
  }
}

TEST_CASE("greedy order on the inception graph stays narrow") {
  auto g = build(ModelSpec{ModelFamily::inception_v3});
  auto res = sort_nodes(g);
  size_t widest = 0;
  for (const auto &d : res.dependent) widest = std::max(widest, d.size() + 1);
  CHECK(widest <= 3);
  size_t bfs_widest = 0;
  for (const auto &d : bfs_dependent_sets(g, bfs_order(g))) {
    bfs_widest = std::max(bfs_widest, d.size());
  }
  CHECK(bfs_widest >= 6);
}

TEST_CASE("bad orderings") {
  auto g = toy();
  CHECK_THROWS_AS(Ordering::from_sequence({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(identity(8).check(g), std::invalid_argument);
}
