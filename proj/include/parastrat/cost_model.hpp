// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "parastrat/config_space.hpp"
#include "parastrat/graph_ir.hpp"

namespace parastrat {

struct MachineModel {
  int p = 1;
  double flops = 1.134e13;     // per-device peak, FLOP/s
  double bandwidth = 1.0e10;   // per-link, bytes/s

  double r() const { return flops / bandwidth; }
  /// Throws std::invalid_argument when p < 1 or F, B are not positive.
  void validate() const;
};

nlohmann::json to_json(const MachineModel &m);
/// Reads {"p", "flops", "bandwidth"}; missing fields keep `base` values.
MachineModel machine_from_json(const nlohmann::json &j,
                               MachineModel base = MachineModel{});

using Strategy = std::map<NodeId, Config>;
using Substrategy = std::map<NodeId, Config>;

class MissingConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All-reduce bytes per participant for a ring over g devices.
double allreduce_bytes(int64_t g, double payload);

struct LayerCost {
  double compute_flop = 0;  // forward + backward, largest shard
  double comm_bytes = 0;    // internal communication per device
  bool generic = false;     // no cost formula for the kind

  double total(double r) const { return compute_flop + r * comm_bytes; }
};

LayerCost layer_cost_breakdown(const Node &node, const Config &cfg);
double layer_cost(const Node &node, const Config &cfg, const MachineModel &m);

/// Per-axis half-open intervals of one device's share of a tensor.
struct DeviceRegion {
  std::vector<std::pair<int64_t, int64_t>> intervals;

  bool empty() const;
  int64_t volume() const;
  bool operator==(const DeviceRegion &) const = default;
};

DeviceRegion intersect(const DeviceRegion &a, const DeviceRegion &b);

/// Region of `tensor` held or needed by logical `device` when `owner` runs
/// under `owner_cfg`. Devices are grouped tensor-major: the splits of dims the
/// tensor does not reference form the fastest-varying replica index, and the
/// remaining shard index is mixed-radix over the tensor axes, axis 0 slowest.
/// Devices at or beyond the config's device count get an empty region.
DeviceRegion region_of(const Node &owner, const TensorRef &tensor,
                       const Config &owner_cfg, int64_t device);

/// Bytes moved for one edge (forward activation plus backward gradient) when
/// the endpoints run under `src_cfg` and `dst_cfg`.
double edge_transfer_bytes(const ComputationGraph &g, int edge,
                           const Config &src_cfg, const Config &dst_cfg);

/// t_x for an edge under a substrategy covering both endpoints.
double transfer_cost(const ComputationGraph &g, int edge, const Substrategy &phi,
                     const MachineModel &m);

/// t_x summed over every edge between two nodes, in either direction.
double pair_transfer_bytes(const ComputationGraph &g, NodeId a, NodeId b,
                           const Substrategy &phi);

struct NodeCostTerm {
  NodeId id = 0;
  LayerCost layer;
  double cost = 0;
};

struct EdgeCostTerm {
  int edge = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double bytes = 0;
  double cost = 0;
};

struct CostBreakdown {
  std::vector<NodeCostTerm> nodes;
  std::vector<EdgeCostTerm> edges;
  double layer_total = 0;
  double transfer_total = 0;
  double total = 0;
};

/// Node terms in node order, then edge terms in edge order; `total` is the
/// running sum in exactly that order.
CostBreakdown strategy_breakdown(const ComputationGraph &g, const Strategy &phi,
                                 const MachineModel &m);
double strategy_cost(const ComputationGraph &g, const Strategy &phi,
                     const MachineModel &m);

/// Batch-only strategy: each node splits its first batch dim as far as p and
/// the dim size allow (largest power of two under the powers_of_two policy).
Strategy data_parallel_strategy(const ComputationGraph &g, int p,
                                ConfigPolicy policy = ConfigPolicy::powers_of_two);

/// Matrix of pair transfer costs (already multiplied by r) for every pair of
/// configs of two adjacent nodes. Row index is a config of `a`.
std::vector<double> pair_cost_matrix(const ComputationGraph &g, int a_index,
                                     int b_index,
                                     const std::vector<Config> &a_cfgs,
                                     const std::vector<Config> &b_cfgs,
                                     const MachineModel &m);

}  // namespace parastrat
