// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations used by the tests. Nothing here calls
// into the solver or the interval code it checks.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "parastrat/graph_ir.hpp"
#include "parastrat/solver.hpp"

namespace oracle {

using parastrat::ComputationGraph;
using parastrat::Dim;
using parastrat::DimRole;
using parastrat::Edge;
using parastrat::LayerKind;
using parastrat::NodeSpec;

/// Random weakly connected graph of 2-D elementwise nodes with ids 1..n. A
/// random spanning tree is drawn first, then extra edges with probability
/// `extra`. Edge directions are random.
inline ComputationGraph random_graph(std::mt19937_64 &rng, int n, double extra,
                                     int64_t batch = 8, int64_t channels = 4) {
  std::vector<NodeSpec> nodes;
  for (int i = 1; i <= n; ++i) {
    nodes.push_back(NodeSpec{i,
                             "v" + std::to_string(i),
                             LayerKind::elementwise,
                             {Dim{"b", batch, DimRole::batch},
                              Dim{"c", channels, DimRole::channel_in}},
                             {0, 1},
                             4});
  }
  std::set<std::pair<int, int>> pairs;
  std::vector<Edge> edges;
  std::bernoulli_distribution coin(0.5);
  auto add = [&](int a, int b) {
    if (a == b || pairs.count({std::min(a, b), std::max(a, b)})) return;
    pairs.insert({std::min(a, b), std::max(a, b)});
    if (coin(rng)) std::swap(a, b);
    edges.push_back(Edge{a, b, {0, 1}});
  };
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i + 1;
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    add(perm[pick(rng)], perm[i]);
  }
  std::bernoulli_distribution more(extra);
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      if (more(rng)) add(a, b);
    }
  }
  return ComputationGraph::build(std::move(nodes), std::move(edges));
}

/// Random cost tables: config counts in [1, max_k] with the product over all
/// nodes kept at or below `max_product`; costs uniform in [0, 1000).
inline parastrat::CostTables synthetic_tables(const ComputationGraph &g,
                                              std::mt19937_64 &rng, int max_k,
                                              double max_product) {
  parastrat::CostTables t;
  const int n = static_cast<int>(g.size());
  std::uniform_real_distribution<double> cost(0.0, 1000.0);
  double product = 1;
  for (int v = 0; v < n; ++v) {
    // Leave room for the remaining nodes to get at least one config each.
    const int cap = static_cast<int>(std::min<double>(max_k, max_product / product));
    std::uniform_int_distribution<int> kd(1, std::max(1, cap));
    const int k = kd(rng);
    product *= k;
    std::vector<parastrat::Config> cfgs;
    std::vector<double> layer;
    for (int c = 0; c < k; ++c) {
      cfgs.push_back(parastrat::Config{{c + 1}});
      layer.push_back(cost(rng));
    }
    t.configs.push_back(std::move(cfgs));
    t.layer.push_back(std::move(layer));
  }
  for (int a = 0; a < n; ++a) {
    for (int b : g.adjacent(a)) {
      if (a >= b) continue;
      std::vector<double> m(t.configs[a].size() * t.configs[b].size());
      for (auto &x : m) x = cost(rng);
      t.add_pair(a, b, std::move(m));
    }
  }
  return t;
}

/// Plain odometer over every strategy; evaluates each one from scratch.
inline double exhaustive_min(const ComputationGraph &g,
                             const parastrat::CostTables &t) {
  const size_t n = g.size();
  std::vector<int> choice(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double c = 0;
    for (size_t v = 0; v < n; ++v) c += t.layer[v][choice[v]];
    for (size_t a = 0; a < n; ++a) {
      for (int b : g.adjacent(static_cast<int>(a))) {
        if (static_cast<int>(a) >= b) continue;
        const auto *p = t.find_pair(static_cast<int>(a), b);
        c += p->cost[choice[a] * t.configs[b].size() + choice[b]];
      }
    }
    best = std::min(best, c);
    size_t k = 0;
    while (k < n && ++choice[k] == static_cast<int>(t.configs[k].size())) {
      choice[k++] = 0;
    }
    if (k == n) break;
  }
  return best;
}

/// Which shard an index falls into under ceiling division, by direct
/// division rather than interval arithmetic.
inline int64_t shard_of(int64_t x, int64_t extent, int64_t split) {
  const int64_t size = (extent + split - 1) / split;
  return x / size;
}

inline bool close(double a, double b, double rel = 1e-9) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= rel * scale;
}

}  // namespace oracle
