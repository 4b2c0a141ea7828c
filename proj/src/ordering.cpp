// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "parastrat/ordering.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace parastrat {

Ordering Ordering::from_sequence(std::vector<NodeId> seq) {
  Ordering o;
  o.seq = std::move(seq);
  for (size_t i = 0; i < o.seq.size(); ++i) {
    if (!o.position.emplace(o.seq[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("ordering repeats node " +
                                  std::to_string(o.seq[i]));
    }
  }
  return o;
}

void Ordering::check(const ComputationGraph &g) const {
  if (seq.size() != g.size() || position.size() != g.size()) {
    throw std::invalid_argument("ordering does not cover the graph");
  }
  for (NodeId id : seq) {
    if (!g.contains(id)) {
      throw std::invalid_argument("ordering names unknown node " +
                                  std::to_string(id));
    }
  }
}

namespace {

// Rank of every dense index.
std::vector<int> ranks_by_index(const ComputationGraph &g, const Ordering &ord) {
  ord.check(g);
  std::vector<int> rank(g.size());
  for (size_t i = 0; i < ord.seq.size(); ++i) {
    rank[g.index_of(ord.seq[i])] = static_cast<int>(i);
  }
  return rank;
}

NodeSet to_ids(const ComputationGraph &g, const std::vector<int> &indices) {
  NodeSet out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(g.at(i).id);
  std::sort(out.begin(), out.end());
  return out;
}

// Dense indices reachable from `start` through nodes with rank <= limit.
std::vector<int> reach(const ComputationGraph &g, const std::vector<int> &rank,
                       int start, int limit, std::vector<char> &seen) {
  std::vector<int> out{start};
  std::vector<int> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : g.adjacent(v)) {
      if (!seen[u] && rank[u] <= limit) {
        seen[u] = 1;
        out.push_back(u);
        stack.push_back(u);
      }
    }
  }
  return out;
}

void check_rank(const Ordering &ord, int i) {
  if (i < 0 || i >= static_cast<int>(ord.size())) {
    throw std::out_of_range("rank " + std::to_string(i) + " out of range");
  }
}

std::vector<int> connected_indices(const ComputationGraph &g,
                                   const std::vector<int> &rank,
                                   const Ordering &ord, int i) {
  std::vector<char> seen(g.size(), 0);
  return reach(g, rank, g.index_of(ord.seq[i]), i, seen);
}

NodeSet dependent_from_rank(const ComputationGraph &g,
                            const std::vector<int> &rank, const Ordering &ord,
                            int i) {
  std::vector<char> mark(g.size(), 0);
  std::vector<int> out;
  for (int v : connected_indices(g, rank, ord, i)) {
    for (int u : g.adjacent(v)) {
      if (rank[u] > i && !mark[u]) {
        mark[u] = 1;
        out.push_back(u);
      }
    }
  }
  return to_ids(g, out);
}

NodeSet bfs_dependent_from_rank(const ComputationGraph &g,
                                const std::vector<int> &rank,
                                const Ordering &ord, int i) {
  std::vector<char> mark(g.size(), 0);
  std::vector<int> out;
  for (int k = 0; k <= i; ++k) {
    for (int u : g.adjacent(g.index_of(ord.seq[k]))) {
      if (rank[u] > i && !mark[u]) {
        mark[u] = 1;
        out.push_back(u);
      }
    }
  }
  return to_ids(g, out);
}

}  // namespace

Ordering bfs_order(const ComputationGraph &g) {
  const size_t n = g.size();
  std::vector<int> indeg(n, 0);
  for (const auto &e : g.edges()) ++indeg[g.index_of(e.dst)];
  int start = 0;
  for (size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) {
      start = static_cast<int>(i);
      break;
    }
  }
  std::vector<char> seen(n, 0);
  std::vector<NodeId> seq;
  std::deque<int> queue{start};
  seen[start] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    seq.push_back(g.at(v).id);
    for (int u : g.adjacent(v)) {
      if (!seen[u]) {
        seen[u] = 1;
        queue.push_back(u);
      }
    }
  }
  return Ordering::from_sequence(std::move(seq));
}

SortResult sort_nodes(const ComputationGraph &g) {
  const size_t n = g.size();
  std::vector<std::set<int>> d(n);
  for (size_t v = 0; v < n; ++v) {
    d[v].insert(g.adjacent(static_cast<int>(v)).begin(),
                g.adjacent(static_cast<int>(v)).end());
  }
  std::vector<char> done(n, 0);
  std::vector<NodeId> seq;
  SortResult out;
  for (size_t i = 0; i < n; ++i) {
    // Dense indices follow id order, so the first minimum has the smallest id.
    int pick = -1;
    for (size_t u = 0; u < n; ++u) {
      if (done[u]) continue;
      if (pick < 0 || d[u].size() < d[pick].size()) pick = static_cast<int>(u);
    }
    done[pick] = 1;
    seq.push_back(g.at(pick).id);
    for (int v : d[pick]) {
      d[v].insert(d[pick].begin(), d[pick].end());
      d[v].erase(pick);
      d[v].erase(v);
    }
    out.dependent.push_back(
        to_ids(g, std::vector<int>(d[pick].begin(), d[pick].end())));
  }
  out.order = Ordering::from_sequence(std::move(seq));
  return out;
}

NodeSet connected_set(const ComputationGraph &g, const Ordering &ord, int i) {
  check_rank(ord, i);
  const auto rank = ranks_by_index(g, ord);
  return to_ids(g, connected_indices(g, rank, ord, i));
}

std::vector<NodeSet> connected_subsets(const ComputationGraph &g,
                                       const Ordering &ord, int i) {
  check_rank(ord, i);
  const auto rank = ranks_by_index(g, ord);
  const int self = g.index_of(ord.seq[i]);
  std::vector<char> seen(g.size(), 0);
  seen[self] = 1;
  std::vector<NodeSet> out;
  for (int v : connected_indices(g, rank, ord, i)) {
    if (seen[v]) continue;
    out.push_back(to_ids(g, reach(g, rank, v, i - 1, seen)));
  }
  std::sort(out.begin(), out.end(),
            [](const NodeSet &a, const NodeSet &b) { return a.front() < b.front(); });
  return out;
}

NodeSet dependent_set_definitional(const ComputationGraph &g,
                                   const Ordering &ord, int i) {
  check_rank(ord, i);
  return dependent_from_rank(g, ranks_by_index(g, ord), ord, i);
}

std::vector<NodeSet> dependent_sets(const ComputationGraph &g,
                                    const Ordering &ord) {
  const auto rank = ranks_by_index(g, ord);
  std::vector<NodeSet> out;
  for (int i = 0; i < static_cast<int>(ord.size()); ++i) {
    out.push_back(dependent_from_rank(g, rank, ord, i));
  }
  return out;
}

NodeSet bfs_dependent_set(const ComputationGraph &g, const Ordering &ord,
                          int i) {
  check_rank(ord, i);
  return bfs_dependent_from_rank(g, ranks_by_index(g, ord), ord, i);
}

std::vector<NodeSet> bfs_dependent_sets(const ComputationGraph &g,
                                        const Ordering &ord) {
  const auto rank = ranks_by_index(g, ord);
  std::vector<NodeSet> out;
  for (int i = 0; i < static_cast<int>(ord.size()); ++i) {
    out.push_back(bfs_dependent_from_rank(g, rank, ord, i));
  }
  return out;
}

}  // namespace parastrat
