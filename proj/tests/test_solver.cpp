// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "parastrat/model_zoo.hpp"
#include "parastrat/solver.hpp"
#include "support/oracles.hpp"

using namespace parastrat;

namespace {

NodeSpec gemm(NodeId id, int64_t b, int64_t n, int64_t c) {
  return NodeSpec{id,
                  "fc" + std::to_string(id),
                  LayerKind::gemm,
                  {{"b", b, DimRole::batch},
                   {"n", n, DimRole::channel_out},
                   {"c", c, DimRole::channel_in}},
                  {0, 1},
                  4};
}

// Chain 1 -> 2 -> ... -> n.
ComputationGraph path_graph(int n) {
  std::vector<NodeSpec> nodes;
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) {
    nodes.push_back(NodeSpec{i, "e", LayerKind::elementwise,
                             {{"b", 8, DimRole::batch}, {"c", 8, DimRole::channel_in}},
                             {0, 1}, 4});
  }
  for (int i = 1; i < n; ++i) edges.push_back(Edge{i, i + 1, {0, 1}});
  return ComputationGraph::build(std::move(nodes), std::move(edges));
}

Strategy random_strategy(const CostTables &t, const ComputationGraph &g,
                         std::mt19937_64 &rng) {
  Strategy phi;
  for (size_t v = 0; v < g.size(); ++v) {
    std::uniform_int_distribution<size_t> pick(0, t.configs[v].size() - 1);
    phi[g.at(static_cast<int>(v)).id] = t.configs[v][pick(rng)];
  }
  return phi;
}

}  // namespace

TEST_CASE("single node picks the cheapest config") {
  auto g = ComputationGraph::build({gemm(1, 64, 512, 512)}, {});
  MachineModel m{8};
  auto r = dp_solve(g, m, ConfigPolicy::powers_of_two);
  double best = std::numeric_limits<double>::infinity();
  Config arg;
  for (const auto &c : enumerate_configs(g.node(1), 8)) {
    const double v = layer_cost(g.node(1), c, m);
    if (v < best) {
      best = v;
      arg = c;
    }
  }
  CHECK(r.cost == doctest::Approx(best).epsilon(1e-12));
  CHECK(r.strategy.at(1) == arg);
}

TEST_CASE("one device yields the all-ones strategy") {
  auto g = build(ModelSpec{ModelFamily::alexnet});
  MachineModel m{1};
  for (auto algo : {Algorithm::dp, Algorithm::bfs, Algorithm::brute}) {
    auto r = solve(g, m, ConfigPolicy::powers_of_two, algo);
    double serial = 0;
    for (const auto &n : g.nodes()) {
      const Config ones{std::vector<int>(n.arity(), 1)};
      CHECK(r.strategy.at(n.id) == ones);
      serial += layer_cost(n, ones, m);
    }
    CHECK(r.cost == doctest::Approx(serial).epsilon(1e-12));
  }
}

TEST_CASE("two-node path by hand") {
  auto g = ComputationGraph::build({gemm(1, 4, 4, 4), gemm(2, 4, 4, 4)},
                                   {{1, 2, {0, 2}}});
  CostTables t;
  t.configs = {{Config{{1, 1, 1}}, Config{{2, 1, 1}}},
               {Config{{1, 1, 1}}, Config{{2, 1, 1}}}};
  t.layer = {{5, 3}, {4, 6}};
  t.add_pair(0, 1, {0, 10, 2, 1});
  // (0,0)=9 (0,1)=21 (1,0)=9 (1,1)=10; ties keep the first found.
  for (auto r : {dp_solve(g, t), bfs_dp_solve(g, t), brute_force_solve(g, t)}) {
    CHECK(r.cost == 9.0);
    CHECK(t.total(r.choice) == 9.0);
  }
}

TEST_CASE("reversed pair insertion is transposed") {
  auto g = ComputationGraph::build({gemm(1, 4, 4, 4), gemm(2, 4, 4, 4)},
                                   {{1, 2, {0, 2}}});
  CostTables t;
  t.configs = {{Config{{1, 1, 1}}, Config{{2, 1, 1}}},
               {Config{{1, 1, 1}}, Config{{2, 1, 1}}, Config{{4, 1, 1}}}};
  t.layer = {{0, 0}, {0, 0, 0}};
  // rows are configs of node index 1
  t.add_pair(1, 0, {1, 2, 3, 4, 5, 6});
  const auto *p = t.find_pair(0, 1);
  REQUIRE(p != nullptr);
  CHECK(p->cost == std::vector<double>{1, 3, 5, 2, 4, 6});
}

TEST_CASE("all three solvers agree with exhaustive search") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> size(1, 7);
  std::uniform_real_distribution<double> density(0.0, 0.6);
  for (int trial = 0; trial < 150; ++trial) {
    auto g = oracle::random_graph(rng, size(rng), density(rng));
    auto t = oracle::synthetic_tables(g, rng, 12, 2e5);
    const double want = oracle::exhaustive_min(g, t);
    auto dp = dp_solve(g, t);
    auto bfs = bfs_dp_solve(g, t);
    auto bf = brute_force_solve(g, t);
    CHECK(oracle::close(dp.cost, want));
    CHECK(oracle::close(bfs.cost, want));
    CHECK(oracle::close(bf.cost, want));
    CHECK(oracle::close(t.total(dp.choice), dp.cost, 1e-12));
    CHECK(oracle::close(t.total(bfs.choice), bfs.cost, 1e-12));
  }
}

TEST_CASE("path graphs give identical results for both recurrences") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = path_graph(2 + trial % 9);
    auto t = oracle::synthetic_tables(g, rng, 10, 1e12);
    auto dp = dp_solve(g, t);
    auto bfs = bfs_dp_solve(g, t);
    CHECK(oracle::close(dp.cost, bfs.cost, 1e-12));
    CHECK(dp.strategy == bfs.strategy);
    CHECK(dp.max_dependent <= 1);
    CHECK(bfs.max_dependent <= 1);
  }
}

TEST_CASE("toy graph on four devices matches brute force") {
  auto g = build(ModelSpec{ModelFamily::toy_fig3});
  MachineModel m{4};
  auto dp = solve(g, m, ConfigPolicy::powers_of_two, Algorithm::dp);
  auto bf = solve(g, m, ConfigPolicy::powers_of_two, Algorithm::brute);
  CHECK(oracle::close(dp.cost, bf.cost, 1e-12));
  REQUIRE(dp.breakdown.has_value());
  CHECK(oracle::close(dp.breakdown->total, dp.cost, 1e-12));
  CHECK(oracle::close(strategy_cost(g, dp.strategy, m), dp.cost, 1e-12));
}

TEST_CASE("real models: reported cost equals re-evaluated strategy") {
  for (auto fam : {ModelFamily::alexnet, ModelFamily::rnnlm}) {
    auto g = build(ModelSpec{fam});
    MachineModel m{8};
    auto r = solve(g, m, ConfigPolicy::powers_of_two, Algorithm::dp);
    CHECK(oracle::close(strategy_cost(g, r.strategy, m), r.cost, 1e-12));
    CHECK(r.cost <= strategy_cost(g, data_parallel_strategy(g, 8), m) * (1 + 1e-12));
  }
}

TEST_CASE("breadth-first recurrence aborts on the inception graph") {
  auto g = build(ModelSpec{ModelFamily::inception_v3});
  MachineModel m{8};
  auto t = tabulate(g, m, ConfigPolicy::powers_of_two);
  try {
    bfs_dp_solve(g, t, SolveOptions{1e8});
    FAIL("expected the table limit to trip");
  } catch (const TableLimitExceeded &e) {
    CHECK(e.projected > 1e8);
    CHECK(e.limit == 1e8);
    CHECK(std::string(e.what()).find("limit") != std::string::npos);
  }
}

TEST_CASE("brute force refuses oversized spaces") {
  auto g = build(ModelSpec{ModelFamily::alexnet});
  CHECK_THROWS_AS(brute_force_solve(g, MachineModel{8}, ConfigPolicy::powers_of_two),
                  SearchSpaceExceeded);
}

TEST_CASE("node cost terms") {
  auto g = ComputationGraph::build({gemm(1, 16, 16, 16), gemm(2, 16, 16, 16)},
                                   {{1, 2, {0, 2}}});
  MachineModel m{4};
  auto ord = Ordering::from_sequence({1, 2});
  Substrategy phi{{1, Config{{4, 1, 1}}}, {2, Config{{1, 4, 1}}}};
  CHECK(node_cost_h(g, ord, 1, phi, m) == layer_cost(g.node(2), phi[2], m));
  CHECK(node_cost_h(g, ord, 0, phi, m) ==
        doctest::Approx(layer_cost(g.node(1), phi[1], m) +
                        m.r() * transfer_cost(g, 0, phi, m)));
}

TEST_CASE("node cost terms telescope to the strategy cost") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = oracle::random_graph(rng, 2 + trial % 8, 0.3, 16, 8);
    MachineModel m{8};
    auto t = tabulate(g, m, ConfigPolicy::all);
    auto phi = random_strategy(t, g, rng);
    auto ord = sort_nodes(g).order;
    double sum = 0;
    for (int i = 0; i < static_cast<int>(g.size()); ++i) {
      sum += node_cost_h(g, ord, i, phi, m);
    }
    CHECK(oracle::close(sum, strategy_cost(g, phi, m), 1e-12));
  }
}

TEST_CASE("thread count does not change the answer") {
  auto g = build(ModelSpec{ModelFamily::alexnet});
  MachineModel m{16};
  auto one = solve(g, m, ConfigPolicy::powers_of_two, Algorithm::dp, {1e8, 1e7, 1});
  auto many = solve(g, m, ConfigPolicy::powers_of_two, Algorithm::dp, {1e8, 1e7, 4});
  CHECK(one.cost == many.cost);
  CHECK(one.choice == many.choice);
}

TEST_CASE("statistics") {
  auto g = build(ModelSpec{ModelFamily::toy_fig3});
  auto r = solve(g, MachineModel{4}, ConfigPolicy::powers_of_two, Algorithm::dp);
  // two channels: (1,1) (1,2) (2,1) (2,2) (4,1)
  CHECK(r.max_configs == 5);
  CHECK(r.min_configs == 5);
  CHECK(r.max_dependent >= 1);
  CHECK(r.dependent.size() == g.size());
  CHECK(r.search_space == doctest::Approx(std::pow(5.0, 9)));
  CHECK(parse_algorithm("bfs") == Algorithm::bfs);
  CHECK_FALSE(parse_algorithm("greedy").has_value());
}
