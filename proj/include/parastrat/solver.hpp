// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parastrat/config_space.hpp"
#include "parastrat/cost_model.hpp"
#include "parastrat/graph_ir.hpp"
#include "parastrat/ordering.hpp"

namespace parastrat {

/// Precomputed costs for every node config and every adjacent pair of
/// configs. Indices are dense node indices. Pair costs are in FLOP (already
/// scaled by r).
struct CostTables {
  struct Pair {
    int a = 0;  // a < b
    int b = 0;
    std::vector<double> cost;  // cost[ca * |C(b)| + cb]
  };

  std::vector<std::vector<Config>> configs;
  std::vector<std::vector<double>> layer;
  std::vector<Pair> pairs;
  std::map<std::pair<int, int>, int> pair_index;

  void add_pair(int a, int b, std::vector<double> cost);
  const Pair *find_pair(int a, int b) const;
  /// Cost of a full choice of config indices: layer terms in node order, then
  /// pair terms in pair order.
  double total(const std::vector<int> &choice) const;
  size_t max_configs() const;
};

CostTables tabulate(const ComputationGraph &g, const MachineModel &m,
                    ConfigPolicy policy, int threads = 0);

enum class Algorithm { dp, bfs, brute };
std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view s);

struct SolveOptions {
  double table_limit = 1e8;   // max configs product over D(i) ∪ {σi}
  double search_limit = 1e7;  // max strategies for brute force
  int threads = 0;            // 0: worker_count()
};

class TableLimitExceeded : public std::runtime_error {
 public:
  TableLimitExceeded(int rank, NodeId node, int m, size_t k, double projected,
                     double limit);
  int rank;
  NodeId node;
  int max_dependent;  // M
  size_t max_configs; // K
  double projected;
  double limit;
};

class SearchSpaceExceeded : public std::runtime_error {
 public:
  SearchSpaceExceeded(double size, double limit);
  double size;
  double limit;
};

struct SolveReport {
  Algorithm algorithm = Algorithm::dp;
  double cost = 0;
  Strategy strategy;
  std::vector<int> choice;  // config index per dense node index
  Ordering order;
  std::vector<NodeSet> dependent;  // per rank; empty for brute force
  int max_dependent = 0;           // M
  size_t max_configs = 0;          // K
  size_t min_configs = 0;
  double mean_configs = 0;
  double max_combinations = 0;     // max over ranks of the product over D ∪ {σ}
  double peak_table_entries = 0;
  double total_table_entries = 0;
  double search_space = 0;         // product of all config counts
  double wall_seconds = 0;
  double tabulate_seconds = 0;
  std::optional<CostBreakdown> breakdown;
};

/// Connected-set recurrence over the greedy sort_nodes ordering.
SolveReport dp_solve(const ComputationGraph &g, const CostTables &t,
                     const SolveOptions &opts = {});
/// Breadth-first recurrence.
SolveReport bfs_dp_solve(const ComputationGraph &g, const CostTables &t,
                         const SolveOptions &opts = {});
SolveReport brute_force_solve(const ComputationGraph &g, const CostTables &t,
                              const SolveOptions &opts = {});

/// Tabulates the cost model, runs the chosen algorithm and fills the
/// breakdown of the winning strategy.
SolveReport solve(const ComputationGraph &g, const MachineModel &m,
                  ConfigPolicy policy, Algorithm algo,
                  const SolveOptions &opts = {});
SolveReport dp_solve(const ComputationGraph &g, const MachineModel &m,
                     ConfigPolicy policy, const SolveOptions &opts = {});
SolveReport bfs_dp_solve(const ComputationGraph &g, const MachineModel &m,
                         ConfigPolicy policy, const SolveOptions &opts = {});
SolveReport brute_force_solve(const ComputationGraph &g, const MachineModel &m,
                              ConfigPolicy policy, const SolveOptions &opts = {});

/// h(i): layer cost of rank i plus r times its transfers with later-ranked
/// neighbors.
double node_cost_h(const ComputationGraph &g, const Ordering &ord, int i,
                   const Substrategy &phi, const MachineModel &m);

/// Largest config-count product over D(i) ∪ {σi} for the given sets.
double max_combinations(const ComputationGraph &g, const Ordering &ord,
                        const std::vector<NodeSet> &dependent,
                        const std::vector<size_t> &config_counts);

}  // namespace parastrat
