// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "parastrat/model_zoo.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace parastrat {

std::string_view to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::alexnet:
      return "alexnet";
    case ModelFamily::inception_v3:
      return "inception_v3";
    case ModelFamily::rnnlm:
      return "rnnlm";
    case ModelFamily::transformer:
      return "transformer";
    case ModelFamily::toy_fig3:
      return "toy_fig3";
  }
  return "alexnet";
}

std::optional<ModelFamily> parse_model_family(std::string_view s) {
  for (auto f : {ModelFamily::alexnet, ModelFamily::inception_v3,
                 ModelFamily::rnnlm, ModelFamily::transformer,
                 ModelFamily::toy_fig3}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

int ModelSpec::effective_batch() const {
  if (batch > 0) return batch;
  switch (family) {
    case ModelFamily::alexnet:
    case ModelFamily::inception_v3:
      return 128;
    default:
      return 64;
  }
}

void ModelSpec::validate() const {
  auto positive = [](int64_t v, const char *name) {
    if (v < 1) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  if (batch < 0) throw std::invalid_argument("batch must be positive");
  positive(rnn_layers, "rnn_layers");
  positive(rnn_seq, "rnn_seq");
  positive(rnn_embed, "rnn_embed");
  positive(rnn_hidden, "rnn_hidden");
  positive(rnn_vocab, "rnn_vocab");
  positive(tf_blocks, "tf_blocks");
  positive(tf_seq, "tf_seq");
  positive(tf_model, "tf_model");
  positive(tf_ff, "tf_ff");
  positive(tf_heads, "tf_heads");
  positive(tf_head_dim, "tf_head_dim");
  positive(tf_vocab, "tf_vocab");
  positive(toy_channels, "toy_channels");
}

namespace {

using R = DimRole;
using L = LayerKind;

class Builder {
 public:
  explicit Builder(NodeId first_id) : next_(first_id) {}

  NodeId add(std::string name, LayerKind kind, std::vector<Dim> dims,
             std::vector<int> output_axes) {
    NodeSpec s;
    s.id = next_++;
    s.name = std::move(name);
    s.kind = kind;
    s.dims = std::move(dims);
    s.output_axes = std::move(output_axes);
    nodes_.push_back(std::move(s));
    return nodes_.back().id;
  }

  void connect(NodeId src, NodeId dst, std::vector<int> map) {
    edges_.push_back(Edge{src, dst, std::move(map)});
  }

  ComputationGraph finish() {
    return ComputationGraph::build(std::move(nodes_), std::move(edges_));
  }

 private:
  NodeId next_;
  std::vector<NodeSpec> nodes_;
  std::vector<Edge> edges_;
};

// Activations flow as (b, c, h, w) between CNN layers.
struct Act {
  NodeId node;
  int64_t channels;
  int64_t size;  // spatial extent (square)
};

std::vector<Dim> conv_dims(int64_t b, int64_t c, int64_t hw, int64_t n,
                           int64_t kh, int64_t kw) {
  return {{"b", b, R::batch},       {"c", c, R::channel_in},
          {"h", hw, R::spatial},    {"w", hw, R::spatial},
          {"n", n, R::channel_out}, {"r", kh, R::filter_spatial},
          {"s", kw, R::filter_spatial}};
}

const std::vector<int> kConvOut{0, 4, 2, 3};
const std::vector<int> kBchw{0, 1, 2, 3};

}  // namespace

ComputationGraph build_alexnet(const ModelSpec &spec) {
  spec.validate();
  const int64_t b = spec.effective_batch();
  Builder g(1);
  struct ConvLayer {
    const char *name;
    int64_t c, hw, n, k;
  };
  const ConvLayer convs[] = {{"conv1", 3, 55, 96, 11},
                             {"conv2", 96, 27, 256, 5},
                             {"conv3", 256, 13, 384, 3},
                             {"conv4", 384, 13, 384, 3},
                             {"conv5", 384, 13, 256, 3}};
  NodeId prev = -1;
  for (const auto &l : convs) {
    NodeId id = g.add(l.name, L::conv2d, conv_dims(b, l.c, l.hw, l.n, l.k, l.k),
                      kConvOut);
    if (prev >= 0) g.connect(prev, id, kBchw);
    prev = id;
  }
  struct FcLayer {
    const char *name;
    int64_t n, c;
  };
  const FcLayer fcs[] = {{"fc1", 4096, 256 * 6 * 6},
                         {"fc2", 4096, 4096},
                         {"fc3", 1000, 4096}};
  bool first = true;
  for (const auto &l : fcs) {
    NodeId id = g.add(l.name, L::gemm,
                      {{"b", b, R::batch},
                       {"n", l.n, R::channel_out},
                       {"c", l.c, R::channel_in}},
                      {0, 1});
    // The flatten folds the pooled spatial extent into the in-channel dim.
    g.connect(prev, id, first ? std::vector<int>{0, 2, -1, -1}
                              : std::vector<int>{0, 2});
    first = false;
    prev = id;
  }
  NodeId sm = g.add("softmax", L::softmax,
                    {{"b", b, R::batch}, {"n", 1000, R::channel_out}}, {0, 1});
  g.connect(prev, sm, {0, 1});
  return g.finish();
}

namespace {

class InceptionBuilder {
 public:
  explicit InceptionBuilder(int64_t batch) : g_(0), b_(batch) {}

  // Convolution followed by its batch-norm/ReLU node.
  Act conv(const std::string &name, const Act &in, int64_t out_c, int64_t kh,
           int64_t kw, int64_t out_size) {
    NodeId c = g_.add(name, L::conv2d,
                      conv_dims(b_, in.channels, out_size, out_c, kh, kw),
                      kConvOut);
    g_.connect(in.node, c, kBchw);
    NodeId bn = g_.add(name + "_bn", L::elementwise, act_dims(out_c, out_size),
                       kBchw);
    g_.connect(c, bn, kBchw);
    return {bn, out_c, out_size};
  }

  Act pool(const std::string &name, const Act &in, int64_t out_size) {
    NodeId p = g_.add(name, L::pooling,
                      {{"b", b_, R::batch},
                       {"c", in.channels, R::channel_in},
                       {"h", out_size, R::spatial},
                       {"w", out_size, R::spatial},
                       {"r", 3, R::filter_spatial},
                       {"s", 3, R::filter_spatial}},
                      kBchw);
    g_.connect(in.node, p, kBchw);
    return {p, in.channels, out_size};
  }

  Act concat(const std::string &name, const std::vector<Act> &parts) {
    int64_t total = 0;
    for (const auto &a : parts) total += a.channels;
    const int64_t size = parts.front().size;
    NodeId c = g_.add(name, L::concat, act_dims(total, size), kBchw);
    for (const auto &a : parts) g_.connect(a.node, c, kBchw);
    return {c, total, size};
  }

  Act module_a(const std::string &n, const Act &in, int64_t pool_features) {
    const int64_t s = in.size;
    Act b1 = conv(n + "_1x1", in, 64, 1, 1, s);
    Act b5 = conv(n + "_5x5_1", in, 48, 1, 1, s);
    b5 = conv(n + "_5x5_2", b5, 64, 5, 5, s);
    Act b3 = conv(n + "_3x3dbl_1", in, 64, 1, 1, s);
    b3 = conv(n + "_3x3dbl_2", b3, 96, 3, 3, s);
    b3 = conv(n + "_3x3dbl_3", b3, 96, 3, 3, s);
    Act bp = pool(n + "_pool", in, s);
    bp = conv(n + "_pool_proj", bp, pool_features, 1, 1, s);
    return concat(n + "_concat", {b1, b5, b3, bp});
  }

  Act module_b(const std::string &n, const Act &in) {
    const int64_t s = in.size, o = (in.size - 3) / 2 + 1;
    Act b3 = conv(n + "_3x3", in, 384, 3, 3, o);
    Act bd = conv(n + "_3x3dbl_1", in, 64, 1, 1, s);
    bd = conv(n + "_3x3dbl_2", bd, 96, 3, 3, s);
    bd = conv(n + "_3x3dbl_3", bd, 96, 3, 3, o);
    Act bp = pool(n + "_pool", in, o);
    return concat(n + "_concat", {b3, bd, bp});
  }

  Act module_c(const std::string &n, const Act &in, int64_t c7) {
    const int64_t s = in.size;
    Act b1 = conv(n + "_1x1", in, 192, 1, 1, s);
    Act b7 = conv(n + "_7x7_1", in, c7, 1, 1, s);
    b7 = conv(n + "_7x7_2", b7, c7, 1, 7, s);
    b7 = conv(n + "_7x7_3", b7, 192, 7, 1, s);
    Act bd = conv(n + "_7x7dbl_1", in, c7, 1, 1, s);
    bd = conv(n + "_7x7dbl_2", bd, c7, 7, 1, s);
    bd = conv(n + "_7x7dbl_3", bd, c7, 1, 7, s);
    bd = conv(n + "_7x7dbl_4", bd, c7, 7, 1, s);
    bd = conv(n + "_7x7dbl_5", bd, 192, 1, 7, s);
    Act bp = pool(n + "_pool", in, s);
    bp = conv(n + "_pool_proj", bp, 192, 1, 1, s);
    return concat(n + "_concat", {b1, b7, bd, bp});
  }

  Act module_d(const std::string &n, const Act &in) {
    const int64_t s = in.size, o = (in.size - 3) / 2 + 1;
    Act b3 = conv(n + "_3x3_1", in, 192, 1, 1, s);
    b3 = conv(n + "_3x3_2", b3, 320, 3, 3, o);
    Act b7 = conv(n + "_7x7x3_1", in, 192, 1, 1, s);
    b7 = conv(n + "_7x7x3_2", b7, 192, 1, 7, s);
    b7 = conv(n + "_7x7x3_3", b7, 192, 7, 1, s);
    b7 = conv(n + "_7x7x3_4", b7, 192, 3, 3, o);
    Act bp = pool(n + "_pool", in, o);
    return concat(n + "_concat", {b3, b7, bp});
  }

  Act module_e(const std::string &n, const Act &in) {
    const int64_t s = in.size;
    Act b1 = conv(n + "_1x1", in, 320, 1, 1, s);
    Act b3 = conv(n + "_3x3_1", in, 384, 1, 1, s);
    Act b3a = conv(n + "_3x3_2a", b3, 384, 1, 3, s);
    Act b3b = conv(n + "_3x3_2b", b3, 384, 3, 1, s);
    Act b3c = concat(n + "_3x3_concat", {b3a, b3b});
    Act bd = conv(n + "_3x3dbl_1", in, 448, 1, 1, s);
    bd = conv(n + "_3x3dbl_2", bd, 384, 3, 3, s);
    Act bda = conv(n + "_3x3dbl_3a", bd, 384, 1, 3, s);
    Act bdb = conv(n + "_3x3dbl_3b", bd, 384, 3, 1, s);
    Act bdc = concat(n + "_3x3dbl_concat", {bda, bdb});
    Act bp = pool(n + "_pool", in, s);
    bp = conv(n + "_pool_proj", bp, 192, 1, 1, s);
    return concat(n + "_concat", {b1, b3c, bdc, bp});
  }

  ComputationGraph build() {
    NodeId input = g_.add("conv1a", L::conv2d, conv_dims(b_, 3, 149, 32, 3, 3),
                          kConvOut);
    NodeId bn = g_.add("conv1a_bn", L::elementwise, act_dims(32, 149), kBchw);
    g_.connect(input, bn, kBchw);
    Act x{bn, 32, 149};
    x = conv("conv2a", x, 32, 3, 3, 147);
    x = conv("conv2b", x, 64, 3, 3, 147);
    x = pool("pool1", x, 73);
    x = conv("conv3b", x, 80, 1, 1, 73);
    x = conv("conv4a", x, 192, 3, 3, 71);
    x = pool("pool2", x, 35);
    x = module_a("mixed5b", x, 32);
    x = module_a("mixed5c", x, 64);
    x = module_a("mixed5d", x, 64);
    x = module_b("mixed6a", x);
    x = module_c("mixed6b", x, 128);
    x = module_c("mixed6c", x, 160);
    x = module_c("mixed6d", x, 160);
    x = module_c("mixed6e", x, 192);
    x = module_d("mixed7a", x);
    x = module_e("mixed7b", x);
    x = module_e("mixed7c", x);
    // Global average pooling is folded into the classifier's input map.
    NodeId fc = g_.add("fc", L::gemm,
                       {{"b", b_, R::batch},
                        {"n", 1000, R::channel_out},
                        {"c", x.channels, R::channel_in}},
                       {0, 1});
    g_.connect(x.node, fc, {0, 2, -1, -1});
    NodeId sm = g_.add("softmax", L::softmax,
                       {{"b", b_, R::batch}, {"n", 1000, R::channel_out}},
                       {0, 1});
    g_.connect(fc, sm, {0, 1});
    return g_.finish();
  }

 private:
  std::vector<Dim> act_dims(int64_t c, int64_t size) const {
    return {{"b", b_, R::batch},
            {"c", c, R::channel_in},
            {"h", size, R::spatial},
            {"w", size, R::spatial}};
  }

  Builder g_;
  int64_t b_;
};

}  // namespace

// Node inventory: 94 convolutions, each followed by a batch-norm/ReLU node,
// 13 pools, 11 module concats, 4 inner concats in the last two modules, the
// classifier and the softmax. Ids are 0-based in build order and each
// module's concat is its last node.
ComputationGraph build_inception_v3(const ModelSpec &spec) {
  spec.validate();
  return InceptionBuilder(spec.effective_batch()).build();
}

ComputationGraph build_rnnlm(const ModelSpec &spec) {
  spec.validate();
  const int64_t b = spec.effective_batch();
  const int64_t s = spec.rnn_seq, d = spec.rnn_embed, e = spec.rnn_hidden,
                v = spec.rnn_vocab;
  Builder g(1);
  NodeId emb = g.add("embedding", L::embedding,
                     {{"b", b, R::batch},
                      {"s", s, R::sequence},
                      {"d", d, R::embed},
                      {"v", v, R::vocab}},
                     {0, 1, 2});
  NodeId lstm = g.add("lstm", L::rnn_lstm,
                      {{"l", spec.rnn_layers, R::layer_stack},
                       {"b", b, R::batch},
                       {"s", s, R::sequence},
                       {"d", d, R::embed},
                       {"e", e, R::hidden}},
                      {1, 2, 4});
  g.connect(emb, lstm, {1, 2, 3});
  NodeId fc = g.add("fc", L::gemm,
                    {{"b", b, R::batch},
                     {"s", s, R::sequence},
                     {"v", v, R::channel_out},
                     {"d", e, R::channel_in}},
                    {0, 1, 2});
  g.connect(lstm, fc, {0, 1, 3});
  NodeId sm = g.add("softmax", L::softmax,
                    {{"b", b, R::batch},
                     {"s", s, R::sequence},
                     {"v", v, R::channel_out}},
                    {0, 1, 2});
  g.connect(fc, sm, {0, 1, 2});
  return g.finish();
}

ComputationGraph build_transformer(const ModelSpec &spec) {
  spec.validate();
  const int64_t b = spec.effective_batch();
  const int64_t s = spec.tf_seq, d = spec.tf_model, ff = spec.tf_ff,
                h = spec.tf_heads, k = spec.tf_head_dim, v = spec.tf_vocab;
  Builder g(1);
  auto embedding = [&](const std::string &name) {
    return g.add(name, L::embedding,
                 {{"b", b, R::batch},
                  {"s", s, R::sequence},
                  {"d", d, R::embed},
                  {"v", v, R::vocab}},
                 {0, 1, 2});
  };
  auto attention = [&](const std::string &name) {
    return g.add(name, L::attention,
                 {{"b", b, R::batch},
                  {"s", s, R::sequence},
                  {"h", h, R::heads},
                  {"c", d, R::embed},
                  {"k", k, R::hidden}},
                 {0, 1, 3});
  };
  // (b, s, d) activations enter attention on its embed dim.
  const std::vector<int> into_attn{0, 1, 3};
  auto feed_forward = [&](const std::string &name, NodeId in) {
    NodeId up = g.add(name + "_in", L::gemm,
                      {{"b", b, R::batch},
                       {"s", s, R::sequence},
                       {"d", d, R::channel_in},
                       {"e", ff, R::channel_out}},
                      {0, 1, 3});
    g.connect(in, up, {0, 1, 2});
    NodeId down = g.add(name + "_out", L::gemm,
                        {{"b", b, R::batch},
                         {"s", s, R::sequence},
                         {"d", d, R::channel_out},
                         {"e", ff, R::channel_in}},
                        {0, 1, 2});
    g.connect(up, down, {0, 1, 3});
    return down;
  };

  NodeId x = embedding("src_embedding");
  for (int i = 1; i <= spec.tf_blocks; ++i) {
    const std::string n = "enc" + std::to_string(i);
    NodeId att = attention(n + "_attn");
    g.connect(x, att, into_attn);
    x = feed_forward(n + "_ff", att);
  }
  const NodeId memory = x;
  NodeId y = embedding("tgt_embedding");
  for (int i = 1; i <= spec.tf_blocks; ++i) {
    const std::string n = "dec" + std::to_string(i);
    NodeId self = attention(n + "_self_attn");
    g.connect(y, self, into_attn);
    NodeId cross = attention(n + "_cross_attn");
    g.connect(self, cross, into_attn);
    g.connect(memory, cross, into_attn);
    y = feed_forward(n + "_ff", cross);
  }
  NodeId fc = g.add("fc", L::gemm,
                    {{"b", b, R::batch},
                     {"s", s, R::sequence},
                     {"v", v, R::channel_out},
                     {"d", d, R::channel_in}},
                    {0, 1, 2});
  g.connect(y, fc, {0, 1, 3});
  NodeId sm = g.add("softmax", L::softmax,
                    {{"b", b, R::batch},
                     {"s", s, R::sequence},
                     {"v", v, R::channel_out}},
                    {0, 1, 2});
  g.connect(fc, sm, {0, 1, 2});
  return g.finish();
}

ComputationGraph build_toy_fig3(const ModelSpec &spec) {
  spec.validate();
  const int64_t b = spec.effective_batch();
  Builder g(1);
  for (int i = 1; i <= 9; ++i) {
    g.add("n" + std::to_string(i), L::elementwise,
          {{"b", b, R::batch}, {"c", spec.toy_channels, R::channel_in}}, {0, 1});
  }
  const std::pair<int, int> edges[] = {{8, 3}, {8, 5}, {3, 5}, {5, 2}, {2, 1},
                                       {8, 7}, {7, 4}, {4, 9}, {8, 6}, {6, 9}};
  for (auto [s, t] : edges) g.connect(s, t, {0, 1});
  return g.finish();
}

ComputationGraph build(const ModelSpec &spec) {
  switch (spec.family) {
    case ModelFamily::alexnet:
      return build_alexnet(spec);
    case ModelFamily::inception_v3:
      return build_inception_v3(spec);
    case ModelFamily::rnnlm:
      return build_rnnlm(spec);
    case ModelFamily::transformer:
      return build_transformer(spec);
    case ModelFamily::toy_fig3:
      return build_toy_fig3(spec);
  }
  throw std::invalid_argument("unknown model family");
}

}  // namespace parastrat
