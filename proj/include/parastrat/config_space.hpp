// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parastrat/graph_ir.hpp"

namespace parastrat {

/// Per-dimension split counts for one node. Ordered lexicographically.
struct Config {
  std::vector<int> splits;

  int64_t devices() const;
  std::string str() const;
  auto operator<=>(const Config &) const = default;
};

enum class ConfigPolicy { all, divisors, powers_of_two };

std::string_view to_string(ConfigPolicy policy);
std::optional<ConfigPolicy> parse_config_policy(std::string_view s);

/// Every valid config of `node` on `p` devices, sorted and deduplicated.
/// The all-ones config is always present.
std::vector<Config> enumerate_configs(const Node &node, int p,
                                      ConfigPolicy policy = ConfigPolicy::powers_of_two);

/// True if `cfg` has the node's arity, positive splits capped by dim sizes and
/// a product of at most p.
bool is_valid_config(const Node &node, const Config &cfg, int p);

/// (ceil(size / split), size of the last shard). The last shard may be empty
/// when ceiling shards overrun the dimension.
std::pair<int64_t, int64_t> shard_extents(const Node &node, const Config &cfg,
                                          int dim);

/// Half-open interval of shard `k` when `extent` is cut into `split` ceiling
/// shards.
std::pair<int64_t, int64_t> shard_interval(int64_t extent, int split, int k);

inline int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

}  // namespace parastrat
