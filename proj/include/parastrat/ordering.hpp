// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <unordered_map>
#include <vector>

#include "parastrat/graph_ir.hpp"

namespace parastrat {

/// A permutation of the graph's nodes. Ranks are 0-based.
struct Ordering {
  std::vector<NodeId> seq;
  std::unordered_map<NodeId, int> position;

  static Ordering from_sequence(std::vector<NodeId> seq);
  size_t size() const { return seq.size(); }
  /// Throws std::invalid_argument unless seq is a permutation of g's nodes.
  void check(const ComputationGraph &g) const;
};

using NodeSet = std::vector<NodeId>;  // sorted ascending

Ordering bfs_order(const ComputationGraph &g);

struct SortResult {
  Ordering order;
  std::vector<NodeSet> dependent;  // incrementally maintained v.d, by rank
};

/// Greedy ordering that repeatedly takes the unsequenced node with the
/// smallest dependent set (ties to the smallest id).
SortResult sort_nodes(const ComputationGraph &g);

/// X(i): nodes of rank <= i reachable from rank i through ranks <= i.
NodeSet connected_set(const ComputationGraph &g, const Ordering &ord, int i);

/// S(i): components of X(i) minus rank i, each sorted, listed by smallest id.
std::vector<NodeSet> connected_subsets(const ComputationGraph &g,
                                       const Ordering &ord, int i);

/// D(i) = N(X(i)) restricted to ranks > i, computed from scratch.
NodeSet dependent_set_definitional(const ComputationGraph &g,
                                   const Ordering &ord, int i);
std::vector<NodeSet> dependent_sets(const ComputationGraph &g,
                                    const Ordering &ord);

/// Breadth-first dependent set: N(ranks <= i) restricted to ranks > i.
NodeSet bfs_dependent_set(const ComputationGraph &g, const Ordering &ord,
                          int i);
std::vector<NodeSet> bfs_dependent_sets(const ComputationGraph &g,
                                        const Ordering &ord);

}  // namespace parastrat
