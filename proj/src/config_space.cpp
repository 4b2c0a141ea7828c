// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "parastrat/config_space.hpp"

#include <algorithm>
#include <sstream>

namespace parastrat {

int64_t Config::devices() const {
  int64_t n = 1;
  for (int s : splits) n *= s;
  return n;
}

std::string Config::str() const {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < splits.size(); ++i) {
    if (i) os << ',';
    os << splits[i];
  }
  os << ')';
  return os.str();
}

std::string_view to_string(ConfigPolicy policy) {
  switch (policy) {
    case ConfigPolicy::all:
      return "all";
    case ConfigPolicy::divisors:
      return "divisors";
    case ConfigPolicy::powers_of_two:
      return "powers_of_two";
  }
  return "powers_of_two";
}

std::optional<ConfigPolicy> parse_config_policy(std::string_view s) {
  if (s == "all") return ConfigPolicy::all;
  if (s == "divisors") return ConfigPolicy::divisors;
  if (s == "powers_of_two") return ConfigPolicy::powers_of_two;
  return std::nullopt;
}

namespace {

std::vector<int> candidate_splits(int64_t size, int p, ConfigPolicy policy) {
  std::vector<int> out;
  const int64_t cap = std::min<int64_t>(size, p);
  for (int64_t s = 1; s <= cap; ++s) {
    switch (policy) {
      case ConfigPolicy::all:
        out.push_back(static_cast<int>(s));
        break;
      case ConfigPolicy::divisors:
        if (size % s == 0) out.push_back(static_cast<int>(s));
        break;
      case ConfigPolicy::powers_of_two:
        if ((s & (s - 1)) == 0) out.push_back(static_cast<int>(s));
        break;
    }
  }
  return out;
}

void extend(const std::vector<std::vector<int>> &cands, size_t dim,
            int64_t budget, std::vector<int> &cur, std::vector<Config> &out) {
  if (dim == cands.size()) {
    out.push_back(Config{cur});
    return;
  }
  for (int s : cands[dim]) {
    if (s > budget) break;
    cur.push_back(s);
    extend(cands, dim + 1, budget / s, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Config> enumerate_configs(const Node &node, int p,
                                      ConfigPolicy policy) {
  std::vector<std::vector<int>> cands;
  for (const auto &d : node.dims) {
    cands.push_back(candidate_splits(d.size, std::max(p, 1), policy));
  }
  std::vector<Config> out;
  std::vector<int> cur;
  // budget / s with integer division keeps the running product <= p.
  extend(cands, 0, std::max(p, 1), cur, out);
  return out;
}

bool is_valid_config(const Node &node, const Config &cfg, int p) {
  if (cfg.splits.size() != node.dims.size()) return false;
  int64_t prod = 1;
  for (size_t i = 0; i < cfg.splits.size(); ++i) {
    if (cfg.splits[i] < 1 || cfg.splits[i] > node.dims[i].size) return false;
    prod *= cfg.splits[i];
    if (prod > p) return false;
  }
  return true;
}

std::pair<int64_t, int64_t> shard_extents(const Node &node, const Config &cfg,
                                          int dim) {
  const int64_t size = node.dims[dim].size;
  const int split = cfg.splits[dim];
  const int64_t shard = ceil_div(size, split);
  const int64_t last = std::max<int64_t>(0, size - shard * (split - 1));
  return {shard, last};
}

std::pair<int64_t, int64_t> shard_interval(int64_t extent, int split, int k) {
  const int64_t shard = ceil_div(extent, split);
  const int64_t lo = std::min(extent, shard * k);
  const int64_t hi = std::min(extent, shard * (k + 1));
  return {lo, hi};
}

}  // namespace parastrat
