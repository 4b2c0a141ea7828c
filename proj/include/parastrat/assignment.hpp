// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <vector>

#include "parastrat/cost_model.hpp"
#include "parastrat/graph_ir.hpp"
#include "parastrat/ordering.hpp"

namespace parastrat {

/// Per node, the physical device of each logical shard. Shards are numbered
/// mixed-radix over the node's iteration dims, dim 0 slowest.
using DeviceMap = std::map<NodeId, std::vector<int>>;

/// Iteration-space box of one node shard.
std::vector<std::pair<int64_t, int64_t>> shard_box(const Node &node,
                                                   const Config &cfg,
                                                   int64_t shard);

/// Volume shared by what `src`'s shard holds and `dst`'s shard needs of the
/// tensor on edge `edge`.
int64_t shard_overlap(const ComputationGraph &g, int edge, const Config &src_cfg,
                      int64_t src_shard, const Config &dst_cfg,
                      int64_t dst_shard);

/// Greedy locality placement in ordering rank. For each node, the unplaced
/// shard and free device with the largest overlap against already-placed
/// neighbor shards are matched first (ties to the lower shard, then the lower
/// device). A node keeps the identity mapping when the greedy total overlap is
/// lower.
DeviceMap greedy_assign(const ComputationGraph &g, const Strategy &phi,
                        const MachineModel &m, const Ordering &ord);

DeviceMap identity_assign(const ComputationGraph &g, const Strategy &phi);

/// Sum over edges and devices of overlap volume under a placement.
int64_t total_overlap(const ComputationGraph &g, const Strategy &phi,
                      const DeviceMap &map);

/// Transfer bytes of one edge once shards sit on physical devices: twice the
/// worst per-device shortfall.
double placed_transfer_bytes(const ComputationGraph &g, int edge,
                             const Strategy &phi, const DeviceMap &map, int p);

nlohmann::json placement_to_json(const DeviceMap &map);

}  // namespace parastrat
