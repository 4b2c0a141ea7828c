// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "parastrat/cost_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace parastrat {

void MachineModel::validate() const {
  if (p < 1) throw std::invalid_argument("machine: p must be >= 1");
  if (!(flops > 0)) throw std::invalid_argument("machine: flops must be > 0");
  if (!(bandwidth > 0)) {
    throw std::invalid_argument("machine: bandwidth must be > 0");
  }
}

nlohmann::json to_json(const MachineModel &m) {
  return {{"p", m.p}, {"flops", m.flops}, {"bandwidth", m.bandwidth}};
}

MachineModel machine_from_json(const nlohmann::json &j, MachineModel base) {
  if (!j.is_object()) throw std::invalid_argument("machine: expected object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "p" && it.key() != "flops" && it.key() != "bandwidth") {
      throw std::invalid_argument("machine: unknown field \"" + it.key() + "\"");
    }
  }
  try {
    if (j.contains("p")) base.p = j.at("p").get<int>();
    if (j.contains("flops")) base.flops = j.at("flops").get<double>();
    if (j.contains("bandwidth")) base.bandwidth = j.at("bandwidth").get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw std::invalid_argument(std::string("machine: ") + e.what());
  }
  base.validate();
  return base;
}

double allreduce_bytes(int64_t g, double payload) {
  if (g <= 1) return 0.0;
  return 2.0 * static_cast<double>(g - 1) / static_cast<double>(g) * payload;
}

namespace {

double allgather_bytes(int64_t g, double full) {
  if (g <= 1) return 0.0;
  return static_cast<double>(g - 1) / static_cast<double>(g) * full;
}

bool has_weights(LayerKind kind) {
  switch (kind) {
    case LayerKind::gemm:
    case LayerKind::conv2d:
    case LayerKind::embedding:
    case LayerKind::rnn_lstm:
    case LayerKind::attention:
      return true;
    default:
      return false;
  }
}

bool is_weight_dim(DimRole role) {
  return role != DimRole::batch && role != DimRole::sequence &&
         role != DimRole::spatial;
}

int find_role(const Node &n, DimRole role, int nth = 0) {
  for (int i = 0; i < n.arity(); ++i) {
    if (n.dims[i].role == role && nth-- == 0) return i;
  }
  return -1;
}

}  // namespace

LayerCost layer_cost_breakdown(const Node &node, const Config &cfg) {
  const int d = node.arity();
  if (static_cast<int>(cfg.splits.size()) != d) {
    throw std::invalid_argument("config arity does not match node " +
                                std::to_string(node.id));
  }
  std::vector<double> shard(d);
  std::vector<int64_t> split(d);
  double points = 1;
  for (int j = 0; j < d; ++j) {
    split[j] = cfg.splits[j];
    shard[j] = static_cast<double>(ceil_div(node.dims[j].size, split[j]));
    points *= shard[j];
  }
  const double eb = node.output.elem_bytes;
  // layer_stack splits hand off activations; they never form partial sums.
  auto exempt = [&](int j) { return node.dims[j].role == DimRole::layer_stack; };

  LayerCost out;
  double fwd = points;
  switch (node.kind) {
    case LayerKind::gemm:
    case LayerKind::conv2d:
      fwd = 2 * points;
      break;
    case LayerKind::embedding:
      fwd = 2 * shard[0] * shard[1] * shard[2];
      break;
    case LayerKind::softmax:
      fwd = 5 * points;
      break;
    case LayerKind::rnn_lstm:
      fwd = 16 * points;
      break;
    case LayerKind::attention:
      fwd = 8 * points +
            4 * shard[0] * shard[1] * shard[2] * shard[4] *
                static_cast<double>(node.dims[1].size);
      break;
    case LayerKind::other:
      out.generic = true;
      break;
    default:
      break;
  }
  out.compute_flop = 3 * fwd;

  // Partial sums of the output over split dims the output does not cover.
  std::vector<char> in_out(d, 0);
  double out_shard = eb;
  for (const auto &a : node.output.axes) {
    in_out[a.dim] = 1;
    out_shard *= shard[a.dim];
  }
  int64_t g_red = 1;
  for (int j = 0; j < d; ++j) {
    if (!in_out[j] && !exempt(j)) g_red *= split[j];
  }
  double comm = allreduce_bytes(g_red, out_shard);

  // Input gradients are partial over split dims the input does not cover.
  for (const auto &in : node.inputs) {
    std::vector<char> covered(d, 0);
    double in_shard = in.ref.elem_bytes;
    for (const auto &a : in.ref.axes) {
      if (a.dim >= 0) {
        covered[a.dim] = 1;
        in_shard *= static_cast<double>(ceil_div(a.extent, split[a.dim]));
      } else {
        in_shard *= static_cast<double>(a.extent);
      }
    }
    int64_t g_in = 1;
    for (int j = 0; j < d; ++j) {
      if (!covered[j] && !exempt(j)) g_in *= split[j];
    }
    comm += allreduce_bytes(g_in, in_shard);
  }

  // Weight gradients are partial over split non-weight dims.
  if (has_weights(node.kind)) {
    double w_shard = eb;
    int64_t g_w = 1;
    for (int j = 0; j < d; ++j) {
      if (is_weight_dim(node.dims[j].role)) {
        w_shard *= shard[j];
      } else {
        g_w *= split[j];
      }
    }
    comm += allreduce_bytes(g_w, w_shard);
  }

  switch (node.kind) {
    case LayerKind::conv2d:
    case LayerKind::pooling: {
      // Halo rows/cols per split spatial dim, forward and backward.
      for (int s = 0; s < 2; ++s) {
        const int sp = find_role(node, DimRole::spatial, s);
        const int fl = find_role(node, DimRole::filter_spatial, s);
        if (sp < 0 || fl < 0 || split[sp] <= 1) continue;
        const double reach = static_cast<double>(node.dims[fl].size - 1);
        if (reach <= 0) continue;
        double face = eb;
        for (int j = 0; j < d; ++j) {
          const auto role = node.dims[j].role;
          if (j == sp) continue;
          if (role == DimRole::batch || role == DimRole::channel_in ||
              role == DimRole::spatial) {
            face *= shard[j];
          }
        }
        comm += 2 * reach * face;
      }
      break;
    }
    case LayerKind::softmax: {
      int64_t g = 1;
      double rows = eb;
      for (int j = 0; j < d; ++j) {
        const auto role = node.dims[j].role;
        if (role == DimRole::batch || role == DimRole::sequence) {
          rows *= shard[j];
        } else {
          g *= split[j];
        }
      }
      // Max and sum forward, one reduction backward.
      comm += 3 * allreduce_bytes(g, rows);
      break;
    }
    case LayerKind::rnn_lstm: {
      // dims: l b s d e
      const double state = shard[1] * shard[4] * eb;
      if (split[0] > 1) comm += 2 * shard[1] * shard[2] * shard[4] * eb;
      if (split[2] > 1) comm += 2 * 2 * state;
      if (split[4] > 1) {
        const double full_h =
            shard[1] * static_cast<double>(node.dims[4].size) * eb;
        comm += 2 * shard[2] * allgather_bytes(split[4], full_h);
      }
      break;
    }
    case LayerKind::attention: {
      // dims: b s h c k
      const double qkv = shard[0] * shard[1] * shard[2] * shard[4] * eb;
      comm += 4 * allreduce_bytes(split[3], qkv);
      if (split[1] > 1) {
        const double kv_full = shard[0] * shard[2] * shard[4] *
                               static_cast<double>(node.dims[1].size) * eb;
        comm += 2 * 2 * allgather_bytes(split[1], kv_full);
      }
      break;
    }
    default:
      break;
  }
  out.comm_bytes = comm;
  return out;
}

double layer_cost(const Node &node, const Config &cfg, const MachineModel &m) {
  return layer_cost_breakdown(node, cfg).total(m.r());
}

bool DeviceRegion::empty() const {
  for (auto [lo, hi] : intervals) {
    if (hi <= lo) return true;
  }
  return false;
}

int64_t DeviceRegion::volume() const {
  int64_t v = 1;
  for (auto [lo, hi] : intervals) v *= std::max<int64_t>(0, hi - lo);
  return v;
}

DeviceRegion intersect(const DeviceRegion &a, const DeviceRegion &b) {
  DeviceRegion out;
  const size_t n = std::min(a.intervals.size(), b.intervals.size());
  for (size_t i = 0; i < n; ++i) {
    out.intervals.push_back({std::max(a.intervals[i].first, b.intervals[i].first),
                             std::min(a.intervals[i].second, b.intervals[i].second)});
  }
  return out;
}

namespace {

// How one side of an edge lays a tensor over devices.
struct Layout {
  std::vector<int> splits;         // per tensor axis
  std::vector<int64_t> extents;    // tensor extent per axis
  std::vector<int64_t> dim_sizes;  // owner dim size per axis
  int64_t replicas = 1;
  int64_t used = 1;
};

Layout make_layout(const Node &owner, const TensorRef &t, const Config &cfg) {
  if (static_cast<int>(cfg.splits.size()) != owner.arity()) {
    throw std::invalid_argument("config arity does not match node " +
                                std::to_string(owner.id));
  }
  Layout l;
  std::vector<char> referenced(owner.arity(), 0);
  for (const auto &a : t.axes) {
    if (a.dim >= owner.arity()) {
      throw std::out_of_range("tensor axis maps past node " +
                              std::to_string(owner.id) + "'s dims");
    }
    if (a.dim >= 0) {
      referenced[a.dim] = 1;
      l.splits.push_back(cfg.splits[a.dim]);
      l.dim_sizes.push_back(owner.dims[a.dim].size);
    } else {
      l.splits.push_back(1);
      l.dim_sizes.push_back(a.extent);
    }
    l.extents.push_back(a.extent);
  }
  for (int j = 0; j < owner.arity(); ++j) {
    l.used *= cfg.splits[j];
    if (!referenced[j]) l.replicas *= cfg.splits[j];
  }
  return l;
}

void fill_region(const Layout &l, int64_t device, DeviceRegion &out) {
  const size_t n = l.splits.size();
  out.intervals.resize(n);
  if (device >= l.used) {
    for (auto &iv : out.intervals) iv = {0, 0};
    return;
  }
  int64_t k = device / l.replicas;
  for (size_t a = n; a-- > 0;) {
    const int ka = static_cast<int>(k % l.splits[a]);
    k /= l.splits[a];
    auto [lo, hi] = shard_interval(l.dim_sizes[a], l.splits[a], ka);
    if (l.dim_sizes[a] != l.extents[a]) {
      // Scale the iteration interval onto a tensor of a different extent.
      const int64_t e = l.extents[a], s = l.dim_sizes[a];
      lo = lo * e / s;
      hi = ceil_div(hi * e, s);
    }
    out.intervals[a] = {lo, hi};
  }
}

// Every device's box of one layout, flattened device-major.
struct Placed {
  int64_t used = 0;
  size_t axes = 0;
  std::vector<int64_t> lo, hi, vol;
};

Placed place(const Layout &l) {
  Placed p;
  p.used = l.used;
  p.axes = l.splits.size();
  p.lo.resize(p.used * p.axes);
  p.hi.resize(p.used * p.axes);
  p.vol.resize(p.used);
  DeviceRegion r;
  for (int64_t d = 0; d < p.used; ++d) {
    fill_region(l, d, r);
    for (size_t a = 0; a < p.axes; ++a) {
      p.lo[d * p.axes + a] = r.intervals[a].first;
      p.hi[d * p.axes + a] = r.intervals[a].second;
    }
    p.vol[d] = r.volume();
  }
  return p;
}

int64_t max_shortfall(const Placed &held, const Placed &need) {
  const size_t n = need.axes;
  int64_t worst = 0;
  for (int64_t d = 0; d < need.used; ++d) {
    if (need.vol[d] == 0) continue;
    int64_t have = 0;
    if (d < held.used) {
      have = 1;
      const int64_t *nl = &need.lo[d * n], *nh = &need.hi[d * n];
      const int64_t *hl = &held.lo[d * n], *hh = &held.hi[d * n];
      for (size_t a = 0; a < n && have > 0; ++a) {
        have *= std::max<int64_t>(0, std::min(nh[a], hh[a]) - std::max(nl[a], hl[a]));
      }
    }
    worst = std::max(worst, need.vol[d] - have);
  }
  return worst;
}

const TensorRef &input_ref_for(const Node &dst, int edge) {
  for (const auto &in : dst.inputs) {
    if (in.edge == edge) return in.ref;
  }
  throw std::logic_error("edge " + std::to_string(edge) +
                         " has no input reference on node " +
                         std::to_string(dst.id));
}

const Config &config_for(const Substrategy &phi, NodeId id) {
  auto it = phi.find(id);
  if (it == phi.end()) {
    throw MissingConfigError("no config for node " + std::to_string(id));
  }
  return it->second;
}

}  // namespace

DeviceRegion region_of(const Node &owner, const TensorRef &tensor,
                       const Config &owner_cfg, int64_t device) {
  DeviceRegion r;
  fill_region(make_layout(owner, tensor, owner_cfg), device, r);
  return r;
}

double edge_transfer_bytes(const ComputationGraph &g, int edge,
                           const Config &src_cfg, const Config &dst_cfg) {
  const Edge &e = g.edges().at(edge);
  const Node &src = g.node(e.src);
  const Node &dst = g.node(e.dst);
  const Placed held = place(make_layout(src, src.output, src_cfg));
  const TensorRef &need_ref = input_ref_for(dst, edge);
  const Placed need = place(make_layout(dst, need_ref, dst_cfg));
  return 2.0 * static_cast<double>(max_shortfall(held, need)) *
         need_ref.elem_bytes;
}

double transfer_cost(const ComputationGraph &g, int edge, const Substrategy &phi,
                     const MachineModel &) {
  const Edge &e = g.edges().at(edge);
  return edge_transfer_bytes(g, edge, config_for(phi, e.src),
                             config_for(phi, e.dst));
}

double pair_transfer_bytes(const ComputationGraph &g, NodeId a, NodeId b,
                           const Substrategy &phi) {
  double total = 0;
  for (int ei : g.incident_edges(g.index_of(a))) {
    const Edge &e = g.edges()[ei];
    if ((e.src == a && e.dst == b) || (e.src == b && e.dst == a)) {
      total += edge_transfer_bytes(g, ei, config_for(phi, e.src),
                                   config_for(phi, e.dst));
    }
  }
  return total;
}

CostBreakdown strategy_breakdown(const ComputationGraph &g, const Strategy &phi,
                                 const MachineModel &m) {
  const double r = m.r();
  CostBreakdown out;
  double total = 0;
  for (const auto &n : g.nodes()) {
    NodeCostTerm t;
    t.id = n.id;
    t.layer = layer_cost_breakdown(n, config_for(phi, n.id));
    t.cost = t.layer.total(r);
    total += t.cost;
    out.layer_total += t.cost;
    out.nodes.push_back(t);
  }
  for (size_t ei = 0; ei < g.edges().size(); ++ei) {
    const Edge &e = g.edges()[ei];
    EdgeCostTerm t;
    t.edge = static_cast<int>(ei);
    t.src = e.src;
    t.dst = e.dst;
    t.bytes = transfer_cost(g, t.edge, phi, m);
    t.cost = r * t.bytes;
    total += t.cost;
    out.transfer_total += t.cost;
    out.edges.push_back(t);
  }
  out.total = total;
  return out;
}

double strategy_cost(const ComputationGraph &g, const Strategy &phi,
                     const MachineModel &m) {
  return strategy_breakdown(g, phi, m).total;
}

Strategy data_parallel_strategy(const ComputationGraph &g, int p,
                                ConfigPolicy policy) {
  Strategy out;
  for (const auto &n : g.nodes()) {
    Config best{std::vector<int>(n.arity(), 1)};
    const int b = find_role(n, DimRole::batch);
    if (b >= 0) {
      for (const auto &c : enumerate_configs(n, p, policy)) {
        bool batch_only = true;
        for (int j = 0; j < n.arity(); ++j) {
          if (j != b && c.splits[j] != 1) batch_only = false;
        }
        if (batch_only && c.splits[b] > best.splits[b]) best = c;
      }
    }
    out[n.id] = best;
  }
  return out;
}

namespace {

using LayoutKey = std::vector<int64_t>;

LayoutKey key_of(const Layout &l) {
  LayoutKey k(l.splits.begin(), l.splits.end());
  k.push_back(l.replicas);
  k.push_back(l.used);
  return k;
}

// Distinct layouts of one side of an edge and, per config, which one it uses.
struct LayoutSet {
  std::vector<Placed> unique;
  std::vector<int> of_config;
};

LayoutSet layouts_for(const Node &owner, const TensorRef &t,
                      const std::vector<Config> &cfgs) {
  LayoutSet s;
  std::map<LayoutKey, int> seen;
  for (const auto &c : cfgs) {
    Layout l = make_layout(owner, t, c);
    auto [it, fresh] = seen.emplace(key_of(l), static_cast<int>(s.unique.size()));
    if (fresh) s.unique.push_back(place(l));
    s.of_config.push_back(it->second);
  }
  return s;
}

}  // namespace

std::vector<double> pair_cost_matrix(const ComputationGraph &g, int a_index,
                                     int b_index,
                                     const std::vector<Config> &a_cfgs,
                                     const std::vector<Config> &b_cfgs,
                                     const MachineModel &m) {
  const size_t ka = a_cfgs.size(), kb = b_cfgs.size();
  std::vector<double> out(ka * kb, 0.0);
  const Node &a = g.at(a_index);
  const Node &b = g.at(b_index);
  const double r = m.r();
  for (int ei : g.incident_edges(a_index)) {
    const Edge &e = g.edges()[ei];
    const bool forward = e.src == a.id && e.dst == b.id;
    const bool backward = e.src == b.id && e.dst == a.id;
    if (!forward && !backward) continue;
    const Node &src = forward ? a : b;
    const Node &dst = forward ? b : a;
    const auto &src_cfgs = forward ? a_cfgs : b_cfgs;
    const auto &dst_cfgs = forward ? b_cfgs : a_cfgs;
    const TensorRef &need_ref = input_ref_for(dst, ei);
    LayoutSet held = layouts_for(src, src.output, src_cfgs);
    LayoutSet need = layouts_for(dst, need_ref, dst_cfgs);
    std::vector<double> small(held.unique.size() * need.unique.size());
    for (size_t h = 0; h < held.unique.size(); ++h) {
      for (size_t n = 0; n < need.unique.size(); ++n) {
        small[h * need.unique.size() + n] =
            2.0 *
            static_cast<double>(max_shortfall(held.unique[h], need.unique[n])) *
            need_ref.elem_bytes;
      }
    }
    for (size_t i = 0; i < ka; ++i) {
      for (size_t j = 0; j < kb; ++j) {
        const int h = forward ? held.of_config[i] : held.of_config[j];
        const int n = forward ? need.of_config[j] : need.of_config[i];
        out[i * kb + j] += r * small[h * need.unique.size() + n];
      }
    }
  }
  return out;
}

}  // namespace parastrat
