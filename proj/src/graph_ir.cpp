// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "parastrat/graph_ir.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace parastrat {

namespace {

constexpr std::array<std::pair<DimRole, std::string_view>, 13> kRoleNames{{
    {DimRole::batch, "batch"},
    {DimRole::spatial, "spatial"},
    {DimRole::channel_in, "channel_in"},
    {DimRole::channel_out, "channel_out"},
    {DimRole::filter_spatial, "filter_spatial"},
    {DimRole::reduction, "reduction"},
    {DimRole::sequence, "sequence"},
    {DimRole::layer_stack, "layer_stack"},
    {DimRole::vocab, "vocab"},
    {DimRole::hidden, "hidden"},
    {DimRole::embed, "embed"},
    {DimRole::heads, "heads"},
    {DimRole::other, "other"},
}};

constexpr std::array<std::pair<LayerKind, std::string_view>, 11> kKindNames{{
    {LayerKind::gemm, "gemm"},
    {LayerKind::conv2d, "conv2d"},
    {LayerKind::pooling, "pooling"},
    {LayerKind::embedding, "embedding"},
    {LayerKind::softmax, "softmax"},
    {LayerKind::elementwise, "elementwise"},
    {LayerKind::concat, "concat"},
    {LayerKind::split, "split"},
    {LayerKind::rnn_lstm, "rnn_lstm"},
    {LayerKind::attention, "attention"},
    {LayerKind::other, "other"},
}};

using R = DimRole;

// Kinds with a fixed role sequence. Others are checked by arity range and an
// allowed role set.
const std::vector<DimRole> *fixed_pattern(LayerKind kind) {
  static const std::vector<DimRole> conv{R::batch,       R::channel_in,
                                         R::spatial,     R::spatial,
                                         R::channel_out, R::filter_spatial,
                                         R::filter_spatial};
  static const std::vector<DimRole> pool{R::batch,   R::channel_in,
                                         R::spatial, R::spatial,
                                         R::filter_spatial,
                                         R::filter_spatial};
  static const std::vector<DimRole> embedding{R::batch, R::sequence, R::embed,
                                              R::vocab};
  static const std::vector<DimRole> lstm{R::layer_stack, R::batch,
                                         R::sequence, R::embed, R::hidden};
  static const std::vector<DimRole> attention{R::batch, R::sequence,
                                              R::heads, R::embed, R::hidden};
  switch (kind) {
    case LayerKind::conv2d:
      return &conv;
    case LayerKind::pooling:
      return &pool;
    case LayerKind::embedding:
      return &embedding;
    case LayerKind::rnn_lstm:
      return &lstm;
    case LayerKind::attention:
      return &attention;
    default:
      return nullptr;
  }
}

std::string node_label(const NodeSpec &n) {
  std::ostringstream os;
  os << "node " << n.id;
  if (!n.name.empty()) os << " (" << n.name << ")";
  return os.str();
}

std::string edge_label(size_t index, const Edge &e) {
  std::ostringstream os;
  os << "edge " << index << " (" << e.src << "->" << e.dst << ")";
  return os.str();
}

void check_kind_shape(const NodeSpec &n) {
  const int d = static_cast<int>(n.dims.size());
  auto fail = [&](const std::string &why) {
    throw ValidationError(node_label(n) + ": " + why);
  };
  if (const auto *pattern = fixed_pattern(n.kind)) {
    if (d != static_cast<int>(pattern->size())) {
      fail(std::string(to_string(n.kind)) + " expects " +
           std::to_string(pattern->size()) + " dims, got " +
           std::to_string(d));
    }
    for (int i = 0; i < d; ++i) {
      if (n.dims[i].role != (*pattern)[i]) {
        fail("dim " + n.dims[i].name + " has role " +
             std::string(to_string(n.dims[i].role)) + ", expected " +
             std::string(to_string((*pattern)[i])));
      }
    }
    return;
  }
  switch (n.kind) {
    case LayerKind::gemm: {
      if (d < 3 || d > 4) fail("gemm expects 3 or 4 dims");
      for (const auto &dim : n.dims) {
        switch (dim.role) {
          case R::batch:
          case R::sequence:
          case R::spatial:
          case R::channel_in:
          case R::channel_out:
          case R::reduction:
            break;
          default:
            fail("gemm dim " + dim.name + " has unsupported role " +
                 std::string(to_string(dim.role)));
        }
      }
      break;
    }
    case LayerKind::softmax:
      if (d < 2 || d > 3) fail("softmax expects 2 or 3 dims");
      break;
    default:
      if (d < 1) fail("node needs at least one dim");
      break;
  }
}

void validate_node(const NodeSpec &n) {
  auto fail = [&](const std::string &why) {
    throw ValidationError(node_label(n) + ": " + why);
  };
  if (n.dims.empty()) fail("empty iteration space");
  std::set<std::string> names;
  for (const auto &dim : n.dims) {
    if (dim.size < 1) fail("dim " + dim.name + " has size < 1");
    if (dim.name.empty()) fail("dim with empty name");
    if (!names.insert(dim.name).second) fail("duplicate dim name " + dim.name);
  }
  check_kind_shape(n);
  if (n.output_axes.empty()) fail("output_axes is empty");
  std::set<int> seen;
  for (int a : n.output_axes) {
    if (a < 0 || a >= static_cast<int>(n.dims.size())) {
      fail("output axis " + std::to_string(a) + " out of range");
    }
    if (!seen.insert(a).second) {
      fail("output axis " + std::to_string(a) + " repeated");
    }
  }
  if (n.elem_bytes < 1) fail("elem_bytes must be positive");
}

bool has_directed_cycle(size_t n, const std::vector<std::pair<int, int>> &arcs) {
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> out(n);
  for (auto [s, t] : arcs) {
    out[s].push_back(t);
    ++indeg[t];
  }
  std::vector<int> stack;
  for (size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) stack.push_back(static_cast<int>(i));
  }
  size_t visited = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++visited;
    for (int t : out[v]) {
      if (--indeg[t] == 0) stack.push_back(t);
    }
  }
  return visited != n;
}

}  // namespace

std::string_view to_string(DimRole role) {
  for (auto [r, s] : kRoleNames) {
    if (r == role) return s;
  }
  return "other";
}

std::string_view to_string(LayerKind kind) {
  for (auto [k, s] : kKindNames) {
    if (k == kind) return s;
  }
  return "other";
}

std::optional<DimRole> parse_dim_role(std::string_view s) {
  for (auto [r, name] : kRoleNames) {
    if (name == s) return r;
  }
  return std::nullopt;
}

std::optional<LayerKind> parse_layer_kind(std::string_view s) {
  for (auto [k, name] : kKindNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

int64_t TensorRef::volume() const {
  int64_t v = 1;
  for (const auto &a : axes) v *= a.extent;
  return v;
}

int count_role(const std::vector<Dim> &dims, DimRole role) {
  return static_cast<int>(std::count_if(
      dims.begin(), dims.end(), [&](const Dim &d) { return d.role == role; }));
}

int ComputationGraph::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw std::out_of_range("unknown node id " + std::to_string(id));
  }
  return it->second;
}

std::vector<int> ComputationGraph::output_axes(int index) const {
  std::vector<int> axes;
  for (const auto &a : nodes_[index].output.axes) axes.push_back(a.dim);
  return axes;
}

ComputationGraph ComputationGraph::build(std::vector<NodeSpec> specs,
                                         std::vector<Edge> edges) {
  if (specs.empty()) throw ValidationError("graph has no nodes");
  std::sort(specs.begin(), specs.end(),
            [](const NodeSpec &a, const NodeSpec &b) { return a.id < b.id; });
  ComputationGraph g;
  for (size_t i = 0; i < specs.size(); ++i) {
    const auto &s = specs[i];
    if (i > 0 && specs[i - 1].id == s.id) {
      throw ValidationError("duplicate node id " + std::to_string(s.id));
    }
    validate_node(s);
    g.index_[s.id] = static_cast<int>(i);
    Node n;
    n.id = s.id;
    n.name = s.name;
    n.kind = s.kind;
    n.dims = s.dims;
    n.output.elem_bytes = s.elem_bytes;
    for (int a : s.output_axes) {
      n.output.axes.push_back({a, s.dims[a].size});
    }
    g.nodes_.push_back(std::move(n));
  }

  const size_t nn = g.nodes_.size();
  g.adj_.assign(nn, {});
  g.incident_.assign(nn, {});
  std::set<std::pair<NodeId, NodeId>> pairs;
  std::vector<std::pair<int, int>> arcs;
  for (size_t ei = 0; ei < edges.size(); ++ei) {
    const auto &e = edges[ei];
    auto fail = [&](const std::string &why) {
      throw ValidationError(edge_label(ei, e) + ": " + why);
    };
    if (!g.contains(e.src)) fail("unknown source node " + std::to_string(e.src));
    if (!g.contains(e.dst)) fail("unknown target node " + std::to_string(e.dst));
    if (e.src == e.dst) fail("self-loop");
    if (!pairs.insert({e.src, e.dst}).second) fail("duplicate edge");
    const int si = g.index_.at(e.src);
    const int di = g.index_.at(e.dst);
    const Node &src = g.nodes_[si];
    Node &dst = g.nodes_[di];
    if (e.dst_axis_map.size() != src.output.axes.size()) {
      fail("dst_axis_map has " + std::to_string(e.dst_axis_map.size()) +
           " entries but the source tensor has " +
           std::to_string(src.output.axes.size()) + " axes");
    }
    std::set<int> used;
    InputRef in;
    in.edge = static_cast<int>(ei);
    in.ref.elem_bytes = src.output.elem_bytes;
    for (size_t k = 0; k < e.dst_axis_map.size(); ++k) {
      int m = e.dst_axis_map[k];
      if (m < -1 || m >= dst.arity()) {
        fail("axis map entry " + std::to_string(m) + " out of range");
      }
      if (m >= 0 && !used.insert(m).second) {
        fail("axis map entry " + std::to_string(m) + " repeated");
      }
      in.ref.axes.push_back({m, src.output.axes[k].extent});
    }
    dst.inputs.push_back(std::move(in));
    g.adj_[si].push_back(di);
    g.adj_[di].push_back(si);
    g.incident_[si].push_back(static_cast<int>(ei));
    g.incident_[di].push_back(static_cast<int>(ei));
    arcs.push_back({si, di});
  }
  for (auto &a : g.adj_) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  g.edges_ = std::move(edges);

  // Weak connectivity.
  std::vector<char> seen(nn, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  size_t reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : g.adj_[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  if (reached != nn) {
    for (size_t i = 0; i < nn; ++i) {
      if (!seen[i]) {
        throw ConnectivityError("graph is not weakly connected: node " +
                                std::to_string(g.nodes_[i].id) +
                                " is unreachable from node " +
                                std::to_string(g.nodes_[0].id));
      }
    }
  }
  if (has_directed_cycle(nn, arcs)) {
    g.warnings_.push_back("graph contains a directed cycle");
  }
  return g;
}

std::vector<NodeId> neighbors(const ComputationGraph &g, NodeId v) {
  std::vector<NodeId> out;
  for (int u : g.adjacent(g.index_of(v))) out.push_back(g.at(u).id);
  return out;
}

nlohmann::json to_json(const ComputationGraph &g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto &n : g.nodes()) {
    nlohmann::json dims = nlohmann::json::array();
    for (const auto &d : n.dims) {
      dims.push_back({{"name", d.name},
                      {"size", d.size},
                      {"role", std::string(to_string(d.role))}});
    }
    nlohmann::json axes = nlohmann::json::array();
    for (const auto &a : n.output.axes) axes.push_back(a.dim);
    nodes.push_back({{"id", n.id},
                     {"name", n.name},
                     {"kind", std::string(to_string(n.kind))},
                     {"dims", dims},
                     {"output_axes", axes},
                     {"elem_bytes", n.output.elem_bytes}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto &e : g.edges()) {
    edges.push_back(
        {{"src", e.src}, {"dst", e.dst}, {"dst_axis_map", e.dst_axis_map}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

namespace {

void reject_unknown(const nlohmann::json &obj,
                    std::initializer_list<std::string_view> allowed,
                    const std::string &where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ParseError(where + ": unknown field \"" + it.key() + "\"");
    }
  }
}

const nlohmann::json &require(const nlohmann::json &obj, const char *key,
                              const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field \"" + key + "\"");
  }
  return *it;
}

template <typename T>
T get_as(const nlohmann::json &v, const std::string &where) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(where + ": " + e.what());
  }
}

}  // namespace

ComputationGraph from_json(const nlohmann::json &j) {
  if (!j.is_object()) throw ParseError("graph: top level must be an object");
  reject_unknown(j, {"nodes", "edges"}, "graph");
  const auto &jn = require(j, "nodes", "graph");
  if (!jn.is_array()) throw ParseError("graph: \"nodes\" must be an array");
  std::vector<NodeSpec> specs;
  for (size_t i = 0; i < jn.size(); ++i) {
    const auto &o = jn[i];
    std::string where = "nodes[" + std::to_string(i) + "]";
    if (!o.is_object()) throw ParseError(where + ": must be an object");
    reject_unknown(o, {"id", "name", "kind", "dims", "output_axes", "elem_bytes"},
                   where);
    NodeSpec s;
    s.id = get_as<int>(require(o, "id", where), where);
    where = "node " + std::to_string(s.id);
    s.name = get_as<std::string>(require(o, "name", where), where);
    auto kind_s = get_as<std::string>(require(o, "kind", where), where);
    auto kind = parse_layer_kind(kind_s);
    if (!kind) throw ParseError(where + ": unknown kind \"" + kind_s + "\"");
    s.kind = *kind;
    const auto &dims = require(o, "dims", where);
    if (!dims.is_array()) throw ParseError(where + ": \"dims\" must be an array");
    for (const auto &d : dims) {
      if (!d.is_object()) throw ParseError(where + ": dim must be an object");
      reject_unknown(d, {"name", "size", "role"}, where);
      Dim dim;
      dim.name = get_as<std::string>(require(d, "name", where), where);
      dim.size = get_as<int64_t>(require(d, "size", where), where);
      auto role_s = get_as<std::string>(require(d, "role", where), where);
      auto role = parse_dim_role(role_s);
      if (!role) throw ParseError(where + ": unknown role \"" + role_s + "\"");
      dim.role = *role;
      s.dims.push_back(std::move(dim));
    }
    s.output_axes =
        get_as<std::vector<int>>(require(o, "output_axes", where), where);
    if (auto it = o.find("elem_bytes"); it != o.end()) {
      s.elem_bytes = get_as<int>(*it, where);
    }
    specs.push_back(std::move(s));
  }
  std::vector<Edge> edges;
  if (auto it = j.find("edges"); it != j.end()) {
    if (!it->is_array()) throw ParseError("graph: \"edges\" must be an array");
    for (size_t i = 0; i < it->size(); ++i) {
      const auto &o = (*it)[i];
      std::string where = "edges[" + std::to_string(i) + "]";
      if (!o.is_object()) throw ParseError(where + ": must be an object");
      reject_unknown(o, {"src", "dst", "dst_axis_map"}, where);
      Edge e;
      e.src = get_as<int>(require(o, "src", where), where);
      e.dst = get_as<int>(require(o, "dst", where), where);
      e.dst_axis_map =
          get_as<std::vector<int>>(require(o, "dst_axis_map", where), where);
      edges.push_back(std::move(e));
    }
  }
  return ComputationGraph::build(std::move(specs), std::move(edges));
}

ComputationGraph parse_graph(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return from_json(j);
}

ComputationGraph load_graph(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

void save_graph(const ComputationGraph &g, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(g).dump(2) << '\n';
}

}  // namespace parastrat
