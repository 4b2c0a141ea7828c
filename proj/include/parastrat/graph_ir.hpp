// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace parastrat {

using NodeId = int;

enum class DimRole {
  batch,
  spatial,
  channel_in,
  channel_out,
  filter_spatial,
  reduction,
  sequence,
  layer_stack,
  vocab,
  hidden,
  embed,
  heads,
  other,
};

enum class LayerKind {
  gemm,
  conv2d,
  pooling,
  embedding,
  softmax,
  elementwise,
  concat,
  split,
  rnn_lstm,
  attention,
  other,
};

std::string_view to_string(DimRole role);
std::string_view to_string(LayerKind kind);
std::optional<DimRole> parse_dim_role(std::string_view s);
std::optional<LayerKind> parse_layer_kind(std::string_view s);

struct Dim {
  std::string name;
  int64_t size = 1;
  DimRole role = DimRole::other;

  bool operator==(const Dim &) const = default;
};

/// One axis of a tensor. `dim` indexes the iteration space of the node the
/// reference belongs to; -1 means the axis is not aligned with any dimension
/// (the node sees it whole).
struct TensorAxis {
  int dim = -1;
  int64_t extent = 1;

  bool operator==(const TensorAxis &) const = default;
};

struct TensorRef {
  std::vector<TensorAxis> axes;
  int elem_bytes = 4;

  int64_t volume() const;
  bool operator==(const TensorRef &) const = default;
};

struct InputRef {
  int edge = -1;  // index into ComputationGraph::edges()
  TensorRef ref;

  bool operator==(const InputRef &) const = default;
};

struct Node {
  NodeId id = 0;
  std::string name;
  LayerKind kind = LayerKind::other;
  std::vector<Dim> dims;
  TensorRef output;
  std::vector<InputRef> inputs;  // derived from incoming edges

  int arity() const { return static_cast<int>(dims.size()); }
  bool operator==(const Node &) const = default;
};

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  std::vector<int> dst_axis_map;

  bool operator==(const Edge &) const = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ParseError : public GraphError {
 public:
  using GraphError::GraphError;
};
class ValidationError : public GraphError {
 public:
  using GraphError::GraphError;
};
class ConnectivityError : public GraphError {
 public:
  using GraphError::GraphError;
};

/// Node skeleton used to assemble a graph; the output tensor is described by
/// the iteration dims it covers.
struct NodeSpec {
  NodeId id = 0;
  std::string name;
  LayerKind kind = LayerKind::other;
  std::vector<Dim> dims;
  std::vector<int> output_axes;
  int elem_bytes = 4;
};

class ComputationGraph {
 public:
  ComputationGraph() = default;

  /// Validates and assembles a graph. Throws ValidationError or
  /// ConnectivityError.
  static ComputationGraph build(std::vector<NodeSpec> nodes,
                                std::vector<Edge> edges);

  const std::vector<Node> &nodes() const { return nodes_; }
  const std::vector<Edge> &edges() const { return edges_; }
  size_t size() const { return nodes_.size(); }

  bool contains(NodeId id) const { return index_.count(id) != 0; }
  /// Dense index of a node; nodes are stored in ascending id order.
  int index_of(NodeId id) const;
  const Node &node(NodeId id) const { return nodes_[index_of(id)]; }
  const Node &at(int index) const { return nodes_[index]; }

  /// Undirected adjacency over dense indices, ascending.
  const std::vector<int> &adjacent(int index) const { return adj_[index]; }
  /// Edge indices incident to the dense index.
  const std::vector<int> &incident_edges(int index) const {
    return incident_[index];
  }

  const std::vector<std::string> &warnings() const { return warnings_; }

  /// The original per-node output axis lists, in node order.
  std::vector<int> output_axes(int index) const;

  bool operator==(const ComputationGraph &o) const {
    return nodes_ == o.nodes_ && edges_ == o.edges_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<NodeId, int> index_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<int>> incident_;
  std::vector<std::string> warnings_;
};

/// N(v): ids adjacent to v in either direction, ascending.
std::vector<NodeId> neighbors(const ComputationGraph &g, NodeId v);

nlohmann::json to_json(const ComputationGraph &g);
ComputationGraph from_json(const nlohmann::json &j);
ComputationGraph parse_graph(std::string_view text);
ComputationGraph load_graph(const std::filesystem::path &path);
void save_graph(const ComputationGraph &g, const std::filesystem::path &path);

/// Number of dims carrying `role`.
int count_role(const std::vector<Dim> &dims, DimRole role);

}  // namespace parastrat
