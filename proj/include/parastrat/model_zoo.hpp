// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "parastrat/graph_ir.hpp"

namespace parastrat {

enum class ModelFamily { alexnet, inception_v3, rnnlm, transformer, toy_fig3 };

std::string_view to_string(ModelFamily f);
std::optional<ModelFamily> parse_model_family(std::string_view s);

/// Builder knobs. Zero means "family default".
struct ModelSpec {
  ModelFamily family = ModelFamily::alexnet;
  int batch = 0;  // 128 for the CNNs, 64 otherwise

  // rnnlm
  int rnn_layers = 2;
  int rnn_seq = 40;
  int rnn_embed = 1024;
  int rnn_hidden = 1024;
  int64_t rnn_vocab = 793471;

  // transformer
  int tf_blocks = 6;  // per stack
  int tf_seq = 256;
  int tf_model = 512;
  int tf_ff = 2048;
  int tf_heads = 8;
  int tf_head_dim = 64;
  int64_t tf_vocab = 32000;

  // toy graph
  int toy_channels = 2;

  int effective_batch() const;
  /// Throws std::invalid_argument on non-positive knobs.
  void validate() const;
};

ComputationGraph build(const ModelSpec &spec);

ComputationGraph build_alexnet(const ModelSpec &spec);
ComputationGraph build_inception_v3(const ModelSpec &spec);
ComputationGraph build_rnnlm(const ModelSpec &spec);
ComputationGraph build_transformer(const ModelSpec &spec);
/// Nine-node toy graph, ids 1..9. Under the order 1..9, rank 5 has connected
/// set {1,2,3,5}, subsets {{1,2},{3}}, dependent set {8} and breadth-first
/// dependent set {7,8,9}.
ComputationGraph build_toy_fig3(const ModelSpec &spec);

}  // namespace parastrat
