// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "parastrat/assignment.hpp"

#include <algorithm>
#include <stdexcept>

namespace parastrat {

namespace {

using Box = std::vector<std::pair<int64_t, int64_t>>;

const TensorRef &input_ref(const Node &dst, int edge) {
  for (const auto &in : dst.inputs) {
    if (in.edge == edge) return in.ref;
  }
  throw std::logic_error("edge has no input reference");
}

// Region of the tensor produced on `edge` that the source shard holds.
Box held_region(const Node &src, const Box &box) {
  Box out;
  for (const auto &a : src.output.axes) out.push_back(box[a.dim]);
  return out;
}

// Region of the tensor on `edge` that the destination shard reads.
Box needed_region(const Node &dst, const TensorRef &ref, const Box &box) {
  Box out;
  for (const auto &a : ref.axes) {
    if (a.dim < 0) {
      out.push_back({0, a.extent});
      continue;
    }
    auto [lo, hi] = box[a.dim];
    const int64_t size = dst.dims[a.dim].size;
    if (size != a.extent) {
      lo = lo * a.extent / size;
      hi = ceil_div(hi * a.extent, size);
    }
    out.push_back({lo, hi});
  }
  return out;
}

int64_t volume(const Box &b) {
  int64_t v = 1;
  for (auto [lo, hi] : b) v *= std::max<int64_t>(0, hi - lo);
  return v;
}

int64_t overlap(const Box &a, const Box &b) {
  int64_t v = 1;
  for (size_t i = 0; i < a.size(); ++i) {
    v *= std::max<int64_t>(0, std::min(a[i].second, b[i].second) -
                                  std::max(a[i].first, b[i].first));
  }
  return v;
}

const Config &cfg_of(const Strategy &phi, NodeId id) {
  auto it = phi.find(id);
  if (it == phi.end()) {
    throw MissingConfigError("no config for node " + std::to_string(id));
  }
  return it->second;
}

std::vector<int> identity(int64_t shards) {
  std::vector<int> v(shards);
  for (int64_t s = 0; s < shards; ++s) v[s] = static_cast<int>(s);
  return v;
}

// Per-edge regions of every shard of both endpoints.
struct EdgeShards {
  std::vector<Box> held;  // by source shard
  std::vector<Box> need;  // by destination shard
};

EdgeShards edge_shards(const ComputationGraph &g, int edge, const Strategy &phi) {
  const Edge &e = g.edges()[edge];
  const Node &src = g.node(e.src);
  const Node &dst = g.node(e.dst);
  const Config &cs = cfg_of(phi, e.src);
  const Config &cd = cfg_of(phi, e.dst);
  const TensorRef &ref = input_ref(dst, edge);
  EdgeShards s;
  for (int64_t k = 0; k < cs.devices(); ++k) {
    s.held.push_back(held_region(src, shard_box(src, cs, k)));
  }
  for (int64_t k = 0; k < cd.devices(); ++k) {
    s.need.push_back(needed_region(dst, ref, shard_box(dst, cd, k)));
  }
  return s;
}

}  // namespace

Box shard_box(const Node &node, const Config &cfg, int64_t shard) {
  Box box(node.arity());
  for (int j = node.arity(); j-- > 0;) {
    const int kj = static_cast<int>(shard % cfg.splits[j]);
    shard /= cfg.splits[j];
    box[j] = shard_interval(node.dims[j].size, cfg.splits[j], kj);
  }
  return box;
}

int64_t shard_overlap(const ComputationGraph &g, int edge, const Config &src_cfg,
                      int64_t src_shard, const Config &dst_cfg,
                      int64_t dst_shard) {
  const Edge &e = g.edges().at(edge);
  const Node &src = g.node(e.src);
  const Node &dst = g.node(e.dst);
  return overlap(
      held_region(src, shard_box(src, src_cfg, src_shard)),
      needed_region(dst, input_ref(dst, edge), shard_box(dst, dst_cfg, dst_shard)));
}

DeviceMap identity_assign(const ComputationGraph &g, const Strategy &phi) {
  DeviceMap map;
  for (const auto &n : g.nodes()) {
    map[n.id] = identity(cfg_of(phi, n.id).devices());
  }
  return map;
}

DeviceMap greedy_assign(const ComputationGraph &g, const Strategy &phi,
                        const MachineModel &m, const Ordering &ord) {
  ord.check(g);
  DeviceMap map;
  for (NodeId id : ord.seq) {
    const int64_t shards = cfg_of(phi, id).devices();
    if (shards > m.p) {
      throw std::invalid_argument("node " + std::to_string(id) +
                                  " has more shards than devices");
    }
    // score[shard][device]: overlap with already placed neighbor shards.
    std::vector<std::vector<int64_t>> score(shards,
                                            std::vector<int64_t>(m.p, 0));
    for (int ei : g.incident_edges(g.index_of(id))) {
      const Edge &e = g.edges()[ei];
      const NodeId other = e.src == id ? e.dst : e.src;
      auto placed = map.find(other);
      if (placed == map.end()) continue;
      const EdgeShards es = edge_shards(g, ei, phi);
      const bool self_is_src = e.src == id;
      const auto &mine = self_is_src ? es.held : es.need;
      const auto &theirs = self_is_src ? es.need : es.held;
      for (int64_t s = 0; s < shards; ++s) {
        for (size_t t = 0; t < theirs.size(); ++t) {
          score[s][placed->second[t]] += overlap(mine[s], theirs[t]);
        }
      }
    }
    // Best remaining (shard, device) pair first; ties to the lower shard,
    // then the lower device.
    std::vector<int> greedy(shards, -1);
    std::vector<char> used(m.p, 0);
    int64_t greedy_total = 0, identity_total = 0;
    for (int64_t step = 0; step < shards; ++step) {
      int64_t best_s = -1;
      int best_d = -1;
      for (int64_t s = 0; s < shards; ++s) {
        if (greedy[s] >= 0) continue;
        for (int d = 0; d < m.p; ++d) {
          if (used[d]) continue;
          if (best_s < 0 || score[s][d] > score[best_s][best_d]) {
            best_s = s;
            best_d = d;
          }
        }
      }
      used[best_d] = 1;
      greedy[best_s] = best_d;
      greedy_total += score[best_s][best_d];
    }
    for (int64_t s = 0; s < shards; ++s) identity_total += score[s][s];
    map[id] = greedy_total >= identity_total ? greedy : identity(shards);
  }
  return map;
}

int64_t total_overlap(const ComputationGraph &g, const Strategy &phi,
                      const DeviceMap &map) {
  int64_t total = 0;
  for (size_t ei = 0; ei < g.edges().size(); ++ei) {
    const Edge &e = g.edges()[ei];
    const EdgeShards es = edge_shards(g, static_cast<int>(ei), phi);
    const auto &ms = map.at(e.src);
    const auto &md = map.at(e.dst);
    for (size_t a = 0; a < es.held.size(); ++a) {
      for (size_t b = 0; b < es.need.size(); ++b) {
        if (ms[a] == md[b]) total += overlap(es.held[a], es.need[b]);
      }
    }
  }
  return total;
}

double placed_transfer_bytes(const ComputationGraph &g, int edge,
                             const Strategy &phi, const DeviceMap &map, int p) {
  const Edge &e = g.edges().at(edge);
  const EdgeShards es = edge_shards(g, edge, phi);
  std::vector<int> held_on(p, -1), need_on(p, -1);
  const auto &ms = map.at(e.src);
  const auto &md = map.at(e.dst);
  for (size_t a = 0; a < ms.size(); ++a) held_on.at(ms[a]) = static_cast<int>(a);
  for (size_t b = 0; b < md.size(); ++b) need_on.at(md[b]) = static_cast<int>(b);
  int64_t worst = 0;
  for (int d = 0; d < p; ++d) {
    if (need_on[d] < 0) continue;
    const Box &need = es.need[need_on[d]];
    int64_t miss = volume(need);
    if (held_on[d] >= 0) miss -= overlap(need, es.held[held_on[d]]);
    worst = std::max(worst, miss);
  }
  const int eb = input_ref(g.node(e.dst), edge).elem_bytes;
  return 2.0 * static_cast<double>(worst) * eb;
}

nlohmann::json placement_to_json(const DeviceMap &map) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto &[id, devices] : map) {
    out.push_back({{"id", id}, {"devices", devices}});
  }
  return out;
}

}  // namespace parastrat
