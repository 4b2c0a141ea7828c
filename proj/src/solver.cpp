// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "parastrat/solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <sstream>

#include "parastrat/parallel.hpp"

namespace parastrat {

void CostTables::add_pair(int a, int b, std::vector<double> cost) {
  if (a > b) {
    // Store with the smaller index first.
    const size_t ka = configs[a].size(), kb = configs[b].size();
    std::vector<double> t(cost.size());
    for (size_t i = 0; i < ka; ++i) {
      for (size_t j = 0; j < kb; ++j) t[j * ka + i] = cost[i * kb + j];
    }
    std::swap(a, b);
    cost = std::move(t);
  }
  pair_index[{a, b}] = static_cast<int>(pairs.size());
  pairs.push_back(Pair{a, b, std::move(cost)});
}

const CostTables::Pair *CostTables::find_pair(int a, int b) const {
  auto it = pair_index.find({std::min(a, b), std::max(a, b)});
  return it == pair_index.end() ? nullptr : &pairs[it->second];
}

double CostTables::total(const std::vector<int> &choice) const {
  double sum = 0;
  for (size_t v = 0; v < layer.size(); ++v) sum += layer[v][choice[v]];
  for (const auto &p : pairs) {
    sum += p.cost[choice[p.a] * configs[p.b].size() + choice[p.b]];
  }
  return sum;
}

size_t CostTables::max_configs() const {
  size_t k = 0;
  for (const auto &c : configs) k = std::max(k, c.size());
  return k;
}

CostTables tabulate(const ComputationGraph &g, const MachineModel &m,
                    ConfigPolicy policy, int threads) {
  m.validate();
  const size_t n = g.size();
  const int workers = worker_count(threads);
  CostTables t;
  t.configs.resize(n);
  t.layer.resize(n);
  parallel_for(n, workers, [&](size_t begin, size_t end) {
    for (size_t v = begin; v < end; ++v) {
      const Node &node = g.at(static_cast<int>(v));
      t.configs[v] = enumerate_configs(node, m.p, policy);
      for (const auto &c : t.configs[v]) {
        t.layer[v].push_back(layer_cost(node, c, m));
      }
    }
  });
  std::vector<std::pair<int, int>> adjacent;
  for (size_t a = 0; a < n; ++a) {
    for (int b : g.adjacent(static_cast<int>(a))) {
      if (static_cast<int>(a) < b) adjacent.push_back({static_cast<int>(a), b});
    }
  }
  std::vector<std::vector<double>> mats(adjacent.size());
  parallel_for(adjacent.size(), workers, [&](size_t begin, size_t end) {
    for (size_t k = begin; k < end; ++k) {
      auto [a, b] = adjacent[k];
      mats[k] = pair_cost_matrix(g, a, b, t.configs[a], t.configs[b], m);
    }
  });
  for (size_t k = 0; k < adjacent.size(); ++k) {
    t.add_pair(adjacent[k].first, adjacent[k].second, std::move(mats[k]));
  }
  return t;
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::dp:
      return "dp";
    case Algorithm::bfs:
      return "bfs";
    case Algorithm::brute:
      return "brute";
  }
  return "dp";
}

std::optional<Algorithm> parse_algorithm(std::string_view s) {
  if (s == "dp") return Algorithm::dp;
  if (s == "bfs") return Algorithm::bfs;
  if (s == "brute") return Algorithm::brute;
  return std::nullopt;
}

namespace {

std::string table_limit_message(int rank, NodeId node, int m, size_t k,
                                double projected, double limit) {
  std::ostringstream os;
  os << "DP table limit exceeded at rank " << rank << " (node " << node
     << "): " << projected << " combinations > limit " << limit << " (M=" << m
     << ", K=" << k << ")";
  return os.str();
}

std::string search_message(double size, double limit) {
  std::ostringstream os;
  os << "brute-force search space " << size << " exceeds limit " << limit;
  return os.str();
}

}  // namespace

TableLimitExceeded::TableLimitExceeded(int rank_, NodeId node_, int m, size_t k,
                                       double projected_, double limit_)
    : std::runtime_error(
          table_limit_message(rank_, node_, m, k, projected_, limit_)),
      rank(rank_),
      node(node_),
      max_dependent(m),
      max_configs(k),
      projected(projected_),
      limit(limit_) {}

SearchSpaceExceeded::SearchSpaceExceeded(double size_, double limit_)
    : std::runtime_error(search_message(size_, limit_)),
      size(size_),
      limit(limit_) {}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void fill_config_stats(const CostTables &t, SolveReport &r) {
  r.max_configs = 0;
  r.min_configs = std::numeric_limits<size_t>::max();
  double sum = 0;
  r.search_space = 1;
  for (const auto &c : t.configs) {
    r.max_configs = std::max(r.max_configs, c.size());
    r.min_configs = std::min(r.min_configs, c.size());
    sum += static_cast<double>(c.size());
    r.search_space *= static_cast<double>(c.size());
  }
  r.mean_configs = t.configs.empty() ? 0 : sum / t.configs.size();
}

void check_tables(const ComputationGraph &g, const CostTables &t) {
  if (t.configs.size() != g.size() || t.layer.size() != g.size()) {
    throw std::invalid_argument("cost tables do not match the graph");
  }
  for (size_t v = 0; v < g.size(); ++v) {
    if (t.configs[v].empty() || t.layer[v].size() != t.configs[v].size()) {
      throw std::invalid_argument("cost tables incomplete for node " +
                                  std::to_string(g.at(static_cast<int>(v)).id));
    }
    for (int u : g.adjacent(static_cast<int>(v))) {
      if (!t.find_pair(static_cast<int>(v), u)) {
        throw std::invalid_argument("cost tables miss a pair matrix");
      }
    }
  }
}

// One term of the per-config sum: arr[base + c * step].
struct Term {
  const double *arr = nullptr;
  size_t step = 0;
  // base = sum over key positions of coeff * digit
  std::vector<std::pair<int, size_t>> coeffs;  // (position in key, multiplier)
};

struct Plan {
  std::vector<int> order;                 // dense index per rank
  std::vector<std::vector<int>> dep;      // dense indices per rank, ascending
  std::vector<std::vector<int>> children; // ranks whose tables feed rank i
};

// Runs the table recurrence for any plan whose children's dependent sets sit
// inside D(i) ∪ {σi}.
SolveReport run_tables(const ComputationGraph &g, const CostTables &t,
                       const Plan &plan, const SolveOptions &opts,
                       SolveReport r) {
  const int n = static_cast<int>(plan.order.size());
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[plan.order[i]] = i;

  std::vector<size_t> k(n);
  for (int v = 0; v < n; ++v) k[v] = t.configs[v].size();

  // Guard before allocating anything.
  r.max_dependent = 0;
  r.max_combinations = 0;
  for (int i = 0; i < n; ++i) {
    double comb = static_cast<double>(k[plan.order[i]]);
    for (int x : plan.dep[i]) comb *= static_cast<double>(k[x]);
    r.max_dependent = std::max(r.max_dependent, static_cast<int>(plan.dep[i].size()));
    r.max_combinations = std::max(r.max_combinations, comb);
  }
  for (int i = 0; i < n; ++i) {
    double comb = static_cast<double>(k[plan.order[i]]);
    for (int x : plan.dep[i]) comb *= static_cast<double>(k[x]);
    if (comb > opts.table_limit) {
      throw TableLimitExceeded(i, g.at(plan.order[i]).id, r.max_dependent,
                               r.max_configs, comb, opts.table_limit);
    }
  }

  // Key strides per rank: last element of dep varies fastest.
  std::vector<std::vector<size_t>> strides(n);
  std::vector<size_t> entries(n);
  for (int i = 0; i < n; ++i) {
    const auto &d = plan.dep[i];
    strides[i].assign(d.size(), 0);
    size_t s = 1;
    for (size_t p = d.size(); p-- > 0;) {
      strides[i][p] = s;
      s *= k[d[p]];
    }
    entries[i] = s;
  }

  std::vector<std::vector<double>> cost(n);
  std::vector<std::vector<int>> best(n);
  const int workers = worker_count(opts.threads);
  double live = 0;

  for (int i = 0; i < n; ++i) {
    const int self = plan.order[i];
    const auto &d = plan.dep[i];
    const size_t ks = k[self];
    auto position = [&](int x) -> int {
      auto it = std::lower_bound(d.begin(), d.end(), x);
      if (it == d.end() || *it != x) return -1;
      return static_cast<int>(it - d.begin());
    };

    std::vector<Term> terms;
    {
      Term layer;
      layer.arr = t.layer[self].data();
      layer.step = 1;
      terms.push_back(std::move(layer));
    }
    for (int v : g.adjacent(self)) {
      if (rank[v] <= i) continue;
      const auto *pair = t.find_pair(self, v);
      const int pos = position(v);
      if (pos < 0) throw std::logic_error("later neighbor outside dependent set");
      Term term;
      term.arr = pair->cost.data();
      if (pair->a == self) {
        term.step = k[v];
        term.coeffs.push_back({pos, 1});
      } else {
        term.step = 1;
        term.coeffs.push_back({pos, ks});
      }
      terms.push_back(std::move(term));
    }
    for (int j : plan.children[i]) {
      Term term;
      term.arr = cost[j].data();
      const auto &dj = plan.dep[j];
      for (size_t q = 0; q < dj.size(); ++q) {
        if (dj[q] == self) {
          term.step = strides[j][q];
          continue;
        }
        const int pos = position(dj[q]);
        if (pos < 0) throw std::logic_error("child key outside parent scope");
        term.coeffs.push_back({pos, strides[j][q]});
      }
      terms.push_back(std::move(term));
    }

    cost[i].assign(entries[i], 0.0);
    best[i].assign(entries[i], 0);
    live += static_cast<double>(entries[i]);
    r.peak_table_entries = std::max(r.peak_table_entries, live);
    r.total_table_entries += static_cast<double>(entries[i]);

    const size_t m = d.size();
    std::vector<size_t> radix(m);
    for (size_t p = 0; p < m; ++p) radix[p] = k[d[p]];
    const auto &stride_i = strides[i];
    auto work = [&](size_t begin, size_t end) {
      std::vector<size_t> digit(m);
      size_t rem = begin;
      for (size_t p = 0; p < m; ++p) {
        digit[p] = rem / stride_i[p];
        rem %= stride_i[p];
      }
      std::vector<double> acc(ks);
      for (size_t key = begin; key < end; ++key) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const auto &term : terms) {
          size_t base = 0;
          for (auto [pos, mul] : term.coeffs) base += digit[pos] * mul;
          const double *a = term.arr + base;
          if (term.step == 1) {
            for (size_t c = 0; c < ks; ++c) acc[c] += a[c];
          } else {
            for (size_t c = 0; c < ks; ++c) acc[c] += a[c * term.step];
          }
        }
        double lo = acc[0];
        int arg = 0;
        for (size_t c = 1; c < ks; ++c) {
          if (acc[c] < lo) {
            lo = acc[c];
            arg = static_cast<int>(c);
          }
        }
        cost[i][key] = lo;
        best[i][key] = arg;
        for (size_t p = m; p-- > 0;) {
          if (++digit[p] < radix[p]) break;
          digit[p] = 0;
        }
      }
    };
    if (entries[i] < 64) {
      work(0, entries[i]);
    } else {
      parallel_for(entries[i], workers, work);
    }

    for (int j : plan.children[i]) {
      live -= static_cast<double>(cost[j].size());
      std::vector<double>().swap(cost[j]);
    }
  }

  r.cost = cost[n - 1][0];
  r.choice.assign(n, 0);
  std::vector<char> assigned(n, 0);
  for (int i = n - 1; i >= 0; --i) {
    size_t key = 0;
    const auto &d = plan.dep[i];
    for (size_t p = 0; p < d.size(); ++p) {
      if (!assigned[d[p]]) throw std::logic_error("back-substitution order");
      key += static_cast<size_t>(r.choice[d[p]]) * strides[i][p];
    }
    r.choice[plan.order[i]] = best[i][key];
    assigned[plan.order[i]] = 1;
  }
  return r;
}

std::vector<int> order_indices(const ComputationGraph &g, const Ordering &ord) {
  std::vector<int> out;
  for (NodeId id : ord.seq) out.push_back(g.index_of(id));
  return out;
}

std::vector<std::vector<int>> dep_indices(const ComputationGraph &g,
                                          const std::vector<NodeSet> &sets) {
  std::vector<std::vector<int>> out;
  for (const auto &s : sets) {
    std::vector<int> d;
    for (NodeId id : s) d.push_back(g.index_of(id));
    std::sort(d.begin(), d.end());
    out.push_back(std::move(d));
  }
  return out;
}

// Roots (highest rank) of the components of X(i) minus σi, for every rank.
std::vector<std::vector<int>> subset_roots(const ComputationGraph &g,
                                           const std::vector<int> &order) {
  const int n = static_cast<int>(order.size());
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[order[i]] = i;
  std::vector<std::vector<int>> out(n);
  std::vector<int> seen(n, -1);
  for (int i = 0; i < n; ++i) {
    const int self = order[i];
    seen[self] = i;
    for (int start : g.adjacent(self)) {
      if (rank[start] >= i || seen[start] == i) continue;
      int root = rank[start];
      std::vector<int> stack{start};
      seen[start] = i;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        root = std::max(root, rank[v]);
        for (int u : g.adjacent(v)) {
          if (rank[u] < i && seen[u] != i) {
            seen[u] = i;
            stack.push_back(u);
          }
        }
      }
      out[i].push_back(root);
    }
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

void finish(const ComputationGraph &g, const CostTables &t, SolveReport &r) {
  for (size_t v = 0; v < g.size(); ++v) {
    r.strategy[g.at(static_cast<int>(v)).id] = t.configs[v][r.choice[v]];
  }
}

}  // namespace

SolveReport dp_solve(const ComputationGraph &g, const CostTables &t,
                     const SolveOptions &opts) {
  check_tables(g, t);
  const auto start = Clock::now();
  SolveReport r;
  r.algorithm = Algorithm::dp;
  fill_config_stats(t, r);
  SortResult sorted = sort_nodes(g);
  Plan plan;
  plan.order = order_indices(g, sorted.order);
  plan.dep = dep_indices(g, sorted.dependent);
  plan.children = subset_roots(g, plan.order);
  r.order = sorted.order;
  r.dependent = sorted.dependent;
  r = run_tables(g, t, plan, opts, std::move(r));
  finish(g, t, r);
  r.wall_seconds = seconds_since(start);
  return r;
}

SolveReport bfs_dp_solve(const ComputationGraph &g, const CostTables &t,
                         const SolveOptions &opts) {
  check_tables(g, t);
  const auto start = Clock::now();
  SolveReport r;
  r.algorithm = Algorithm::bfs;
  fill_config_stats(t, r);
  r.order = bfs_order(g);
  r.dependent = bfs_dependent_sets(g, r.order);
  Plan plan;
  plan.order = order_indices(g, r.order);
  plan.dep = dep_indices(g, r.dependent);
  plan.children.resize(plan.order.size());
  for (size_t i = 1; i < plan.order.size(); ++i) {
    plan.children[i].push_back(static_cast<int>(i) - 1);
  }
  r = run_tables(g, t, plan, opts, std::move(r));
  finish(g, t, r);
  r.wall_seconds = seconds_since(start);
  return r;
}

SolveReport brute_force_solve(const ComputationGraph &g, const CostTables &t,
                              const SolveOptions &opts) {
  check_tables(g, t);
  const auto start = Clock::now();
  SolveReport r;
  r.algorithm = Algorithm::brute;
  fill_config_stats(t, r);
  if (r.search_space > opts.search_limit) {
    throw SearchSpaceExceeded(r.search_space, opts.search_limit);
  }
  const int n = static_cast<int>(g.size());
  std::vector<std::vector<std::pair<int, const CostTables::Pair *>>> earlier(n);
  for (int v = 0; v < n; ++v) {
    for (int u : g.adjacent(v)) {
      if (u < v) earlier[v].push_back({u, t.find_pair(u, v)});
    }
  }
  std::vector<int> choice(n, 0);
  std::vector<int> best_choice;
  double best = std::numeric_limits<double>::infinity();
  // Depth-first odometer in index order with running partial sums.
  auto recurse = [&](auto &&self, int v, double partial) -> void {
    if (v == n) {
      if (partial < best) {
        best = partial;
        best_choice = choice;
      }
      return;
    }
    const size_t kv = t.configs[v].size();
    for (size_t c = 0; c < kv; ++c) {
      double s = partial + t.layer[v][c];
      for (auto [u, pair] : earlier[v]) {
        s += pair->cost[static_cast<size_t>(choice[u]) * kv + c];
      }
      choice[v] = static_cast<int>(c);
      self(self, v + 1, s);
    }
  };
  recurse(recurse, 0, 0.0);
  r.cost = best;
  r.choice = best_choice;
  std::vector<NodeId> seq;
  for (const auto &node : g.nodes()) seq.push_back(node.id);
  r.order = Ordering::from_sequence(std::move(seq));
  finish(g, t, r);
  r.wall_seconds = seconds_since(start);
  return r;
}

SolveReport solve(const ComputationGraph &g, const MachineModel &m,
                  ConfigPolicy policy, Algorithm algo, const SolveOptions &opts) {
  m.validate();
  const auto start = Clock::now();
  CostTables t = tabulate(g, m, policy, opts.threads);
  const double tab = seconds_since(start);
  SolveReport r;
  switch (algo) {
    case Algorithm::dp:
      r = dp_solve(g, t, opts);
      break;
    case Algorithm::bfs:
      r = bfs_dp_solve(g, t, opts);
      break;
    case Algorithm::brute:
      r = brute_force_solve(g, t, opts);
      break;
  }
  r.tabulate_seconds = tab;
  r.wall_seconds += tab;
  r.breakdown = strategy_breakdown(g, r.strategy, m);
  return r;
}

SolveReport dp_solve(const ComputationGraph &g, const MachineModel &m,
                     ConfigPolicy policy, const SolveOptions &opts) {
  return solve(g, m, policy, Algorithm::dp, opts);
}

SolveReport bfs_dp_solve(const ComputationGraph &g, const MachineModel &m,
                         ConfigPolicy policy, const SolveOptions &opts) {
  return solve(g, m, policy, Algorithm::bfs, opts);
}

SolveReport brute_force_solve(const ComputationGraph &g, const MachineModel &m,
                              ConfigPolicy policy, const SolveOptions &opts) {
  return solve(g, m, policy, Algorithm::brute, opts);
}

double node_cost_h(const ComputationGraph &g, const Ordering &ord, int i,
                   const Substrategy &phi, const MachineModel &m) {
  const NodeId self = ord.seq.at(i);
  auto it = phi.find(self);
  if (it == phi.end()) {
    throw MissingConfigError("no config for node " + std::to_string(self));
  }
  double h = layer_cost(g.node(self), it->second, m);
  for (NodeId v : neighbors(g, self)) {
    if (ord.position.at(v) > i) {
      h += m.r() * pair_transfer_bytes(g, self, v, phi);
    }
  }
  return h;
}

double max_combinations(const ComputationGraph &g, const Ordering &ord,
                        const std::vector<NodeSet> &dependent,
                        const std::vector<size_t> &config_counts) {
  double worst = 0;
  for (size_t i = 0; i < ord.seq.size(); ++i) {
    double c = static_cast<double>(config_counts[g.index_of(ord.seq[i])]);
    for (NodeId v : dependent[i]) {
      c *= static_cast<double>(config_counts[g.index_of(v)]);
    }
    worst = std::max(worst, c);
  }
  return worst;
}

}  // namespace parastrat
